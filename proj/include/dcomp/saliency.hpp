// saliency.hpp
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "dcomp/raster.hpp"

namespace dcomp {

/// In-place 2-D radix-2 FFT over separate real/imaginary planes.
/// Dimensions must be powers of two.
void fft2d(FloatPlane& re, FloatPlane& im, bool inverse);
void fft2d_serial(FloatPlane& re, FloatPlane& im, bool inverse);
void fft2d_parallel(FloatPlane& re, FloatPlane& im, bool inverse);

/// Spectral-residual saliency: luma, downscale to 64x64, suppress the
/// smooth part of the log amplitude spectrum, back-transform, square,
/// Gaussian smooth, min-max normalize (flat inputs map to all zeros), and
/// resize to the input size. Deterministic.
FloatPlane spectral_residual_saliency(const Raster& image);
FloatPlane spectral_residual_saliency_serial(const Raster& image);
FloatPlane spectral_residual_saliency_parallel(const Raster& image);

} // namespace dcomp
