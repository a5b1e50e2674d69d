// kernels.hpp
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dcomp/geometry.hpp"
#include "dcomp/raster.hpp"

namespace dcomp::kern {

// Data-parallel pixel kernels. Every kernel comes in a *_serial reference
// version and an OpenMP *_parallel version that must match it byte for
// byte; the unsuffixed entry dispatches on par::mode(). Parallel variants
// only ever partition disjoint rows, so results do not depend on the
// schedule or thread count.

void fill_rgb_serial(Raster& dst, Rgb color);
void fill_rgb_parallel(Raster& dst, Rgb color);
void fill_rgb(Raster& dst, Rgb color);

/// Bilinear resample of an RGBA (or RGB/gray) raster to out_w x out_h.
Raster resample_bilinear_serial(const Raster& src, int out_w, int out_h);
Raster resample_bilinear_parallel(const Raster& src, int out_w, int out_h);
Raster resample_bilinear(const Raster& src, int out_w, int out_h);

/// Straight-alpha "over" blend of an RGBA patch onto an RGB destination at
/// (dst_x, dst_y), clipped to the destination bounds.
void blend_patch_serial(Raster& dst, const Raster& patch, int dst_x, int dst_y);
void blend_patch_parallel(Raster& dst, const Raster& patch, int dst_x, int dst_y);
void blend_patch(Raster& dst, const Raster& patch, int dst_x, int dst_y);

/// Fused resample+blend: samples src as if resampled to `box` and blends
/// the on-canvas part over dst. Never allocates more than the visible
/// region, so arbitrarily large boxes stay cheap. Pixel-identical to
/// resample_bilinear followed by blend_patch.
void blend_resampled_serial(Raster& dst, const Raster& src, const BBox& box);
void blend_resampled_parallel(Raster& dst, const Raster& src, const BBox& box);
void blend_resampled(Raster& dst, const Raster& src, const BBox& box);

/// BT.601 luma of an RGB/RGBA raster, scaled to [0,1].
FloatPlane to_grayscale_serial(const Raster& src);
FloatPlane to_grayscale_parallel(const Raster& src);
FloatPlane to_grayscale(const Raster& src);

/// Central-difference gradient magnitude with clamp-to-edge borders.
FloatPlane gradient_magnitude_serial(const FloatPlane& src);
FloatPlane gradient_magnitude_parallel(const FloatPlane& src);
FloatPlane gradient_magnitude(const FloatPlane& src);

FloatPlane resize_bilinear_serial(const FloatPlane& src, int out_w, int out_h);
FloatPlane resize_bilinear_parallel(const FloatPlane& src, int out_w, int out_h);
FloatPlane resize_bilinear(const FloatPlane& src, int out_w, int out_h);

/// 3x3 box blur with clamp-to-edge borders (spectral-residual smoothing).
FloatPlane box_blur3_serial(const FloatPlane& src);
FloatPlane box_blur3_parallel(const FloatPlane& src);
FloatPlane box_blur3(const FloatPlane& src);

/// Separable Gaussian blur; ksize must be odd.
FloatPlane gaussian_blur_serial(const FloatPlane& src, int ksize, double sigma);
FloatPlane gaussian_blur_parallel(const FloatPlane& src, int ksize, double sigma);
FloatPlane gaussian_blur(const FloatPlane& src, int ksize, double sigma);

/// Per-row coverage mask over [0,w) x [0,h) of the union of boxes
/// (each clipped to the canvas); bits laid out row-major, one byte per px.
std::vector<std::uint8_t> union_mask(std::span<const BBox> boxes, int w, int h);

struct MaskedSum {
    double sum = 0.0;          // sum of plane values under the mask
    std::int64_t count = 0;    // mask pixel count
};

/// Sum of plane values where mask != 0. Row partial sums are folded
/// serially, so the result is identical in both modes.
MaskedSum masked_sum_serial(const FloatPlane& plane, std::span<const std::uint8_t> mask);
MaskedSum masked_sum_parallel(const FloatPlane& plane, std::span<const std::uint8_t> mask);
MaskedSum masked_sum(const FloatPlane& plane, std::span<const std::uint8_t> mask);

struct ThresholdCounts {
    std::int64_t below = 0;         // plane < tau
    std::int64_t below_in_mask = 0; // plane < tau and mask != 0
};

ThresholdCounts threshold_counts_serial(const FloatPlane& plane,
                                        std::span<const std::uint8_t> mask, float tau);
ThresholdCounts threshold_counts_parallel(const FloatPlane& plane,
                                          std::span<const std::uint8_t> mask, float tau);
ThresholdCounts threshold_counts(const FloatPlane& plane,
                                 std::span<const std::uint8_t> mask, float tau);

} // namespace dcomp::kern
