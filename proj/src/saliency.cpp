// saliency.cpp
// SPDX-License-Identifier: Apache-2.0
#include "dcomp/saliency.hpp"

#include <cmath>
#include <stdexcept>

#include "dcomp/kernels.hpp"
#include "dcomp/parallel.hpp"

namespace dcomp {

namespace {

constexpr int kSpectralSize = 64;

bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

/// Iterative in-place radix-2 FFT of one line (stride-able).
void fft_line(float* re, float* im, int n, int stride, bool inverse) {
    // Bit-reversal permutation.
    for (int i = 1, j = 0; i < n; ++i) {
        int bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) {
            std::swap(re[i * stride], re[j * stride]);
            std::swap(im[i * stride], im[j * stride]);
        }
    }
    for (int len = 2; len <= n; len <<= 1) {
        const double ang = (inverse ? 2.0 : -2.0) * 3.14159265358979323846 / len;
        const double wr = std::cos(ang), wi = std::sin(ang);
        for (int i = 0; i < n; i += len) {
            double cr = 1.0, ci = 0.0;
            for (int k = 0; k < len / 2; ++k) {
                float* ar = re + (i + k) * stride;
                float* ai = im + (i + k) * stride;
                float* br = re + (i + k + len / 2) * stride;
                float* bi = im + (i + k + len / 2) * stride;
                const double tr = *br * cr - *bi * ci;
                const double ti = *br * ci + *bi * cr;
                const double ur = *ar, ui = *ai;
                *ar = static_cast<float>(ur + tr);
                *ai = static_cast<float>(ui + ti);
                *br = static_cast<float>(ur - tr);
                *bi = static_cast<float>(ui - ti);
                const double ncr = cr * wr - ci * wi;
                ci = cr * wi + ci * wr;
                cr = ncr;
            }
        }
    }
}

void fft2d_impl(FloatPlane& re, FloatPlane& im, bool inverse, bool parallel) {
    const int w = re.width(), h = re.height();
    if (!is_pow2(w) || !is_pow2(h))
        throw std::invalid_argument("fft2d: dimensions must be powers of two");

    auto rows = [&](int y) { fft_line(&re.at(0, y), &im.at(0, y), w, 1, inverse); };
    auto cols = [&](int x) { fft_line(&re.at(x, 0), &im.at(x, 0), h, w, inverse); };
#ifdef DCOMP_HAVE_OPENMP
    if (parallel) {
#pragma omp parallel for schedule(static)
        for (int y = 0; y < h; ++y) rows(y);
#pragma omp parallel for schedule(static)
        for (int x = 0; x < w; ++x) cols(x);
    } else
#endif
    {
        (void)parallel;
        for (int y = 0; y < h; ++y) rows(y);
        for (int x = 0; x < w; ++x) cols(x);
    }
    if (inverse) {
        const float scale = 1.0f / (static_cast<float>(w) * h);
        for (float& v : re.data()) v *= scale;
        for (float& v : im.data()) v *= scale;
    }
}

FloatPlane saliency_impl(const Raster& image, bool parallel) {
    auto gray = parallel ? kern::to_grayscale_parallel(image) : kern::to_grayscale_serial(image);
    auto small = parallel ? kern::resize_bilinear_parallel(gray, kSpectralSize, kSpectralSize)
                          : kern::resize_bilinear_serial(gray, kSpectralSize, kSpectralSize);

    // Flat inputs have no residual structure; without this guard the
    // unit-magnitude reconstruction away from DC would normalize FFT noise
    // into a full-range map.
    {
        float lo = small.data()[0], hi = small.data()[0];
        for (float v : small.data()) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        if (hi - lo < 1e-3f) return FloatPlane(image.width(), image.height(), 0.0f);
    }

    FloatPlane re(kSpectralSize, kSpectralSize), im(kSpectralSize, kSpectralSize);
    for (std::size_t i = 0; i < small.data().size(); ++i)
        re.data()[i] = small.data()[i] * 255.0f;
    fft2d_impl(re, im, false, parallel);

    FloatPlane log_amp(kSpectralSize, kSpectralSize), phase(kSpectralSize, kSpectralSize);
    for (std::size_t i = 0; i < re.data().size(); ++i) {
        const float mag = std::hypot(re.data()[i], im.data()[i]);
        log_amp.data()[i] = std::log(1.0f + mag);
        phase.data()[i] = std::atan2(im.data()[i], re.data()[i]);
    }

    auto smooth = parallel ? kern::box_blur3_parallel(log_amp) : kern::box_blur3_serial(log_amp);
    for (std::size_t i = 0; i < re.data().size(); ++i) {
        const float mag = std::exp(log_amp.data()[i] - smooth.data()[i]);
        re.data()[i] = mag * std::cos(phase.data()[i]);
        im.data()[i] = mag * std::sin(phase.data()[i]);
    }
    fft2d_impl(re, im, true, parallel);

    FloatPlane sal(kSpectralSize, kSpectralSize);
    for (std::size_t i = 0; i < sal.data().size(); ++i) {
        const float m2 = re.data()[i] * re.data()[i] + im.data()[i] * im.data()[i];
        sal.data()[i] = m2;
    }
    sal = parallel ? kern::gaussian_blur_parallel(sal, 5, 8.0)
                   : kern::gaussian_blur_serial(sal, 5, 8.0);

    float lo = sal.data()[0], hi = sal.data()[0];
    for (float v : sal.data()) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    // Flat inputs leave only FFT rounding noise around the DC term; treat a
    // relatively flat map as all-zero instead of amplifying that noise.
    if (hi - lo <= 1e-6f * std::max(std::abs(hi), 1e-20f)) {
        for (float& v : sal.data()) v = 0.0f;
    } else {
        for (float& v : sal.data()) v = (v - lo) / (hi - lo);
    }

    return parallel ? kern::resize_bilinear_parallel(sal, image.width(), image.height())
                    : kern::resize_bilinear_serial(sal, image.width(), image.height());
}

} // namespace

void fft2d_serial(FloatPlane& re, FloatPlane& im, bool inverse) {
    fft2d_impl(re, im, inverse, false);
}
void fft2d_parallel(FloatPlane& re, FloatPlane& im, bool inverse) {
    fft2d_impl(re, im, inverse, true);
}
void fft2d(FloatPlane& re, FloatPlane& im, bool inverse) {
    fft2d_impl(re, im, inverse, par::mode() == par::Mode::Parallel);
}

FloatPlane spectral_residual_saliency_serial(const Raster& image) {
    return saliency_impl(image, false);
}
FloatPlane spectral_residual_saliency_parallel(const Raster& image) {
    return saliency_impl(image, true);
}
FloatPlane spectral_residual_saliency(const Raster& image) {
    return saliency_impl(image, par::mode() == par::Mode::Parallel);
}

} // namespace dcomp
