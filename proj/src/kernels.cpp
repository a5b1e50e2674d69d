// kernels.cpp
// SPDX-License-Identifier: Apache-2.0
#include "dcomp/kernels.hpp"

#include <algorithm>
#include <cmath>

#include "dcomp/parallel.hpp"

namespace dcomp::kern {

namespace {

template <class Fn>
void rows_serial(int h, Fn&& fn) {
    for (int y = 0; y < h; ++y) fn(y);
}

template <class Fn>
void rows_parallel(int h, Fn&& fn) {
#ifdef DCOMP_HAVE_OPENMP
#pragma omp parallel for schedule(static)
    for (int y = 0; y < h; ++y) fn(y);
#else
    rows_serial(h, fn);
#endif
}

bool use_parallel() { return par::mode() == par::Mode::Parallel; }

inline std::uint8_t to_u8(double v) {
    return static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0) + 0.5);
}

// ---- fill ----

void fill_row(Raster& dst, Rgb color, int y) {
    std::uint8_t* p = dst.row(y);
    const int c = dst.channels();
    for (int x = 0; x < dst.width(); ++x, p += c) {
        p[0] = color.r;
        if (c >= 3) {
            p[1] = color.g;
            p[2] = color.b;
        }
        if (c == 4) p[3] = 255;
    }
}

// ---- resample ----

/// One output texel of a virtual bilinear resample of src to out_w x out_h.
/// Shared by the materializing and the fused kernels so they can never
/// disagree on a pixel value.
void sample_resampled(const Raster& src, int out_w, int out_h, int ox, int oy,
                      std::uint8_t* out_px) {
    const int sw = src.width(), sh = src.height(), c = src.channels();
    const double sy = (oy + 0.5) * (static_cast<double>(sh) / out_h) - 0.5;
    const int y0 = std::clamp(static_cast<int>(std::floor(sy)), 0, sh - 1);
    const int y1 = std::min(y0 + 1, sh - 1);
    const double fy = std::clamp(sy - y0, 0.0, 1.0);

    const double sx = (ox + 0.5) * (static_cast<double>(sw) / out_w) - 0.5;
    const int x0 = std::clamp(static_cast<int>(std::floor(sx)), 0, sw - 1);
    const int x1 = std::min(x0 + 1, sw - 1);
    const double fx = std::clamp(sx - x0, 0.0, 1.0);

    const std::uint8_t* p00 = src.px(x0, y0);
    const std::uint8_t* p10 = src.px(x1, y0);
    const std::uint8_t* p01 = src.px(x0, y1);
    const std::uint8_t* p11 = src.px(x1, y1);

    const double w00 = (1 - fx) * (1 - fy), w10 = fx * (1 - fy);
    const double w01 = (1 - fx) * fy, w11 = fx * fy;

    if (c == 4) {
        // Interpolate premultiplied so transparent texels do not bleed.
        const double a00 = p00[3], a10 = p10[3], a01 = p01[3], a11 = p11[3];
        const double a = w00 * a00 + w10 * a10 + w01 * a01 + w11 * a11;
        for (int k = 0; k < 3; ++k) {
            const double v = w00 * p00[k] * a00 + w10 * p10[k] * a10 + w01 * p01[k] * a01 +
                             w11 * p11[k] * a11;
            out_px[k] = a > 0.0 ? to_u8(v / a) : 0;
        }
        out_px[3] = to_u8(a);
    } else {
        for (int k = 0; k < c; ++k) {
            const double v = w00 * p00[k] + w10 * p10[k] + w01 * p01[k] + w11 * p11[k];
            out_px[k] = to_u8(v);
        }
    }
}

void resample_row(const Raster& src, Raster& out, int oy) {
    const int c = src.channels();
    std::uint8_t* op = out.row(oy);
    for (int ox = 0; ox < out.width(); ++ox, op += c)
        sample_resampled(src, out.width(), out.height(), ox, oy, op);
}

// ---- blend ----

inline void blend_px(std::uint8_t* dp, int dc, const std::uint8_t* sp, int sc) {
    const int a = sc == 4 ? sp[3] : 255;
    if (a == 0) return;
    const int inv = 255 - a;
    for (int k = 0; k < 3; ++k)
        dp[k] = static_cast<std::uint8_t>((sp[k] * a + dp[k] * inv + 127) / 255);
    if (dc == 4) dp[3] = static_cast<std::uint8_t>(a + dp[3] * inv / 255);
}

void blend_row(Raster& dst, const Raster& patch, int dst_x, int dst_y, int py) {
    const int y = dst_y + py;
    if (y < 0 || y >= dst.height()) return;
    const int pc = patch.channels(), dc = dst.channels();
    const int x_begin = std::max(0, -dst_x);
    const int x_end = std::min(patch.width(), dst.width() - dst_x);
    const std::uint8_t* sp = patch.row(py) + static_cast<std::size_t>(x_begin) * pc;
    std::uint8_t* dp = dst.px(std::max(dst_x, 0), y);
    for (int x = x_begin; x < x_end; ++x, sp += pc, dp += dc) blend_px(dp, dc, sp, pc);
}

void blend_resampled_row(Raster& dst, const Raster& src, const BBox& box, int y) {
    const int dc = dst.channels(), sc = src.channels();
    const int x_begin = std::max(box.left, 0);
    const int x_end = std::min(box.right(), dst.width());
    std::uint8_t* dp = dst.px(x_begin, y);
    std::uint8_t texel[4];
    for (int x = x_begin; x < x_end; ++x, dp += dc) {
        sample_resampled(src, box.width, box.height, x - box.left, y - box.top, texel);
        blend_px(dp, dc, texel, sc);
    }
}

// ---- grayscale / gradient / resize / blur ----

void gray_row(const Raster& src, FloatPlane& out, int y) {
    const int c = src.channels();
    const std::uint8_t* p = src.row(y);
    for (int x = 0; x < src.width(); ++x, p += c) {
        float v;
        if (c == 1)
            v = p[0];
        else
            v = 0.299f * p[0] + 0.587f * p[1] + 0.114f * p[2];
        out.at(x, y) = v / 255.0f;
    }
}

void gradient_row(const FloatPlane& src, FloatPlane& out, int y) {
    const int w = src.width(), h = src.height();
    const int ym = std::max(y - 1, 0), yp = std::min(y + 1, h - 1);
    for (int x = 0; x < w; ++x) {
        const int xm = std::max(x - 1, 0), xp = std::min(x + 1, w - 1);
        const float gx = 0.5f * (src.at(xp, y) - src.at(xm, y));
        const float gy = 0.5f * (src.at(x, yp) - src.at(x, ym));
        out.at(x, y) = std::sqrt(gx * gx + gy * gy);
    }
}

void resize_plane_row(const FloatPlane& src, FloatPlane& out, int oy) {
    const int sw = src.width(), sh = src.height();
    const int ow = out.width(), oh = out.height();
    const double sy = (oy + 0.5) * static_cast<double>(sh) / oh - 0.5;
    const int y0 = std::clamp(static_cast<int>(std::floor(sy)), 0, sh - 1);
    const int y1 = std::min(y0 + 1, sh - 1);
    const double fy = std::clamp(sy - y0, 0.0, 1.0);
    for (int ox = 0; ox < ow; ++ox) {
        const double sx = (ox + 0.5) * static_cast<double>(sw) / ow - 0.5;
        const int x0 = std::clamp(static_cast<int>(std::floor(sx)), 0, sw - 1);
        const int x1 = std::min(x0 + 1, sw - 1);
        const double fx = std::clamp(sx - x0, 0.0, 1.0);
        const double v = (1 - fy) * ((1 - fx) * src.at(x0, y0) + fx * src.at(x1, y0)) +
                         fy * ((1 - fx) * src.at(x0, y1) + fx * src.at(x1, y1));
        out.at(ox, oy) = static_cast<float>(v);
    }
}

void box3_row(const FloatPlane& src, FloatPlane& out, int y) {
    const int w = src.width(), h = src.height();
    for (int x = 0; x < w; ++x) {
        float acc = 0.f;
        for (int dy = -1; dy <= 1; ++dy) {
            const int yy = std::clamp(y + dy, 0, h - 1);
            for (int dx = -1; dx <= 1; ++dx) {
                const int xx = std::clamp(x + dx, 0, w - 1);
                acc += src.at(xx, yy);
            }
        }
        out.at(x, y) = acc / 9.0f;
    }
}

std::vector<float> gaussian_kernel(int ksize, double sigma) {
    std::vector<float> k(ksize);
    const int c = ksize / 2;
    double sum = 0.0;
    for (int i = 0; i < ksize; ++i) {
        const double d = i - c;
        k[i] = static_cast<float>(std::exp(-d * d / (2.0 * sigma * sigma)));
        sum += k[i];
    }
    for (float& v : k) v = static_cast<float>(v / sum);
    return k;
}

void gauss_h_row(const FloatPlane& src, FloatPlane& out, const std::vector<float>& k, int y) {
    const int w = src.width();
    const int c = static_cast<int>(k.size()) / 2;
    for (int x = 0; x < w; ++x) {
        float acc = 0.f;
        for (int i = 0; i < static_cast<int>(k.size()); ++i)
            acc += k[i] * src.at(std::clamp(x + i - c, 0, w - 1), y);
        out.at(x, y) = acc;
    }
}

void gauss_v_row(const FloatPlane& src, FloatPlane& out, const std::vector<float>& k, int y) {
    const int w = src.width(), h = src.height();
    const int c = static_cast<int>(k.size()) / 2;
    for (int x = 0; x < w; ++x) {
        float acc = 0.f;
        for (int i = 0; i < static_cast<int>(k.size()); ++i)
            acc += k[i] * src.at(x, std::clamp(y + i - c, 0, h - 1));
        out.at(x, y) = acc;
    }
}

MaskedSum masked_sum_impl(const FloatPlane& plane, std::span<const std::uint8_t> mask,
                          bool parallel) {
    const int w = plane.width(), h = plane.height();
    std::vector<double> row_sum(h, 0.0);
    std::vector<std::int64_t> row_count(h, 0);
    auto row = [&](int y) {
        double s = 0.0;
        std::int64_t n = 0;
        const std::uint8_t* m = mask.data() + static_cast<std::size_t>(y) * w;
        for (int x = 0; x < w; ++x)
            if (m[x]) {
                s += plane.at(x, y);
                ++n;
            }
        row_sum[y] = s;
        row_count[y] = n;
    };
    if (parallel)
        rows_parallel(h, row);
    else
        rows_serial(h, row);
    MaskedSum out;
    for (int y = 0; y < h; ++y) {
        out.sum += row_sum[y];
        out.count += row_count[y];
    }
    return out;
}

ThresholdCounts threshold_impl(const FloatPlane& plane, std::span<const std::uint8_t> mask,
                               float tau, bool parallel) {
    const int w = plane.width(), h = plane.height();
    std::vector<std::int64_t> below(h, 0), below_mask(h, 0);
    auto row = [&](int y) {
        const std::uint8_t* m = mask.data() + static_cast<std::size_t>(y) * w;
        std::int64_t b = 0, bm = 0;
        for (int x = 0; x < w; ++x)
            if (plane.at(x, y) < tau) {
                ++b;
                if (m[x]) ++bm;
            }
        below[y] = b;
        below_mask[y] = bm;
    };
    if (parallel)
        rows_parallel(h, row);
    else
        rows_serial(h, row);
    ThresholdCounts out;
    for (int y = 0; y < h; ++y) {
        out.below += below[y];
        out.below_in_mask += below_mask[y];
    }
    return out;
}

} // namespace

void fill_rgb_serial(Raster& dst, Rgb color) {
    rows_serial(dst.height(), [&](int y) { fill_row(dst, color, y); });
}
void fill_rgb_parallel(Raster& dst, Rgb color) {
    rows_parallel(dst.height(), [&](int y) { fill_row(dst, color, y); });
}
void fill_rgb(Raster& dst, Rgb color) {
    use_parallel() ? fill_rgb_parallel(dst, color) : fill_rgb_serial(dst, color);
}

Raster resample_bilinear_serial(const Raster& src, int out_w, int out_h) {
    Raster out(out_w, out_h, src.channels());
    rows_serial(out_h, [&](int y) { resample_row(src, out, y); });
    return out;
}
Raster resample_bilinear_parallel(const Raster& src, int out_w, int out_h) {
    Raster out(out_w, out_h, src.channels());
    rows_parallel(out_h, [&](int y) { resample_row(src, out, y); });
    return out;
}
Raster resample_bilinear(const Raster& src, int out_w, int out_h) {
    return use_parallel() ? resample_bilinear_parallel(src, out_w, out_h)
                          : resample_bilinear_serial(src, out_w, out_h);
}

void blend_patch_serial(Raster& dst, const Raster& patch, int dst_x, int dst_y) {
    rows_serial(patch.height(), [&](int py) { blend_row(dst, patch, dst_x, dst_y, py); });
}
void blend_patch_parallel(Raster& dst, const Raster& patch, int dst_x, int dst_y) {
    rows_parallel(patch.height(), [&](int py) { blend_row(dst, patch, dst_x, dst_y, py); });
}
void blend_patch(Raster& dst, const Raster& patch, int dst_x, int dst_y) {
    use_parallel() ? blend_patch_parallel(dst, patch, dst_x, dst_y)
                   : blend_patch_serial(dst, patch, dst_x, dst_y);
}

static void blend_resampled_impl(Raster& dst, const Raster& src, const BBox& box,
                                 bool parallel) {
    if (box.width <= 0 || box.height <= 0) return;
    const int y_begin = std::max(box.top, 0);
    const int y_end = std::min(box.bottom(), dst.height());
    if (y_begin >= y_end) return;
    auto row = [&](int i) { blend_resampled_row(dst, src, box, y_begin + i); };
    if (parallel)
        rows_parallel(y_end - y_begin, row);
    else
        rows_serial(y_end - y_begin, row);
}
void blend_resampled_serial(Raster& dst, const Raster& src, const BBox& box) {
    blend_resampled_impl(dst, src, box, false);
}
void blend_resampled_parallel(Raster& dst, const Raster& src, const BBox& box) {
    blend_resampled_impl(dst, src, box, true);
}
void blend_resampled(Raster& dst, const Raster& src, const BBox& box) {
    blend_resampled_impl(dst, src, box, use_parallel());
}

FloatPlane to_grayscale_serial(const Raster& src) {
    FloatPlane out(src.width(), src.height());
    rows_serial(src.height(), [&](int y) { gray_row(src, out, y); });
    return out;
}
FloatPlane to_grayscale_parallel(const Raster& src) {
    FloatPlane out(src.width(), src.height());
    rows_parallel(src.height(), [&](int y) { gray_row(src, out, y); });
    return out;
}
FloatPlane to_grayscale(const Raster& src) {
    return use_parallel() ? to_grayscale_parallel(src) : to_grayscale_serial(src);
}

FloatPlane gradient_magnitude_serial(const FloatPlane& src) {
    FloatPlane out(src.width(), src.height());
    rows_serial(src.height(), [&](int y) { gradient_row(src, out, y); });
    return out;
}
FloatPlane gradient_magnitude_parallel(const FloatPlane& src) {
    FloatPlane out(src.width(), src.height());
    rows_parallel(src.height(), [&](int y) { gradient_row(src, out, y); });
    return out;
}
FloatPlane gradient_magnitude(const FloatPlane& src) {
    return use_parallel() ? gradient_magnitude_parallel(src) : gradient_magnitude_serial(src);
}

FloatPlane resize_bilinear_serial(const FloatPlane& src, int out_w, int out_h) {
    FloatPlane out(out_w, out_h);
    rows_serial(out_h, [&](int y) { resize_plane_row(src, out, y); });
    return out;
}
FloatPlane resize_bilinear_parallel(const FloatPlane& src, int out_w, int out_h) {
    FloatPlane out(out_w, out_h);
    rows_parallel(out_h, [&](int y) { resize_plane_row(src, out, y); });
    return out;
}
FloatPlane resize_bilinear(const FloatPlane& src, int out_w, int out_h) {
    return use_parallel() ? resize_bilinear_parallel(src, out_w, out_h)
                          : resize_bilinear_serial(src, out_w, out_h);
}

FloatPlane box_blur3_serial(const FloatPlane& src) {
    FloatPlane out(src.width(), src.height());
    rows_serial(src.height(), [&](int y) { box3_row(src, out, y); });
    return out;
}
FloatPlane box_blur3_parallel(const FloatPlane& src) {
    FloatPlane out(src.width(), src.height());
    rows_parallel(src.height(), [&](int y) { box3_row(src, out, y); });
    return out;
}
FloatPlane box_blur3(const FloatPlane& src) {
    return use_parallel() ? box_blur3_parallel(src) : box_blur3_serial(src);
}

static FloatPlane gaussian_impl(const FloatPlane& src, int ksize, double sigma, bool parallel) {
    const auto k = gaussian_kernel(ksize, sigma);
    FloatPlane tmp(src.width(), src.height());
    FloatPlane out(src.width(), src.height());
    auto hrow = [&](int y) { gauss_h_row(src, tmp, k, y); };
    auto vrow = [&](int y) { gauss_v_row(tmp, out, k, y); };
    if (parallel) {
        rows_parallel(src.height(), hrow);
        rows_parallel(src.height(), vrow);
    } else {
        rows_serial(src.height(), hrow);
        rows_serial(src.height(), vrow);
    }
    return out;
}
FloatPlane gaussian_blur_serial(const FloatPlane& src, int ksize, double sigma) {
    return gaussian_impl(src, ksize, sigma, false);
}
FloatPlane gaussian_blur_parallel(const FloatPlane& src, int ksize, double sigma) {
    return gaussian_impl(src, ksize, sigma, true);
}
FloatPlane gaussian_blur(const FloatPlane& src, int ksize, double sigma) {
    return gaussian_impl(src, ksize, sigma, use_parallel());
}

std::vector<std::uint8_t> union_mask(std::span<const BBox> boxes, int w, int h) {
    std::vector<std::uint8_t> mask(static_cast<std::size_t>(w) * h, 0);
    for (const BBox& b : boxes) {
        auto c = clip_to_canvas(b, w, h);
        if (!c) continue;
        for (int y = c->top; y < c->bottom(); ++y) {
            std::uint8_t* m = mask.data() + static_cast<std::size_t>(y) * w;
            std::fill(m + c->left, m + c->right(), std::uint8_t{1});
        }
    }
    return mask;
}

MaskedSum masked_sum_serial(const FloatPlane& plane, std::span<const std::uint8_t> mask) {
    return masked_sum_impl(plane, mask, false);
}
MaskedSum masked_sum_parallel(const FloatPlane& plane, std::span<const std::uint8_t> mask) {
    return masked_sum_impl(plane, mask, true);
}
MaskedSum masked_sum(const FloatPlane& plane, std::span<const std::uint8_t> mask) {
    return masked_sum_impl(plane, mask, use_parallel());
}

ThresholdCounts threshold_counts_serial(const FloatPlane& plane,
                                        std::span<const std::uint8_t> mask, float tau) {
    return threshold_impl(plane, mask, tau, false);
}
ThresholdCounts threshold_counts_parallel(const FloatPlane& plane,
                                          std::span<const std::uint8_t> mask, float tau) {
    return threshold_impl(plane, mask, tau, true);
}
ThresholdCounts threshold_counts(const FloatPlane& plane,
                                 std::span<const std::uint8_t> mask, float tau) {
    return threshold_impl(plane, mask, tau, use_parallel());
}

} // namespace dcomp::kern
