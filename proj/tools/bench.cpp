// bench.cpp
// SPDX-License-Identifier: Apache-2.0
//
// Times the serial reference kernels against their OpenMP counterparts on
// poster-sized workloads and verifies the outputs stay byte-identical.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "dcomp/kernels.hpp"
#include "dcomp/parallel.hpp"
#include "dcomp/raster.hpp"
#include "dcomp/saliency.hpp"

using namespace dcomp;

namespace {

Raster pattern(int w, int h, int salt) {
    Raster img(w, h, 4);
    for (int y = 0; y < h; ++y) {
        std::uint8_t* p = img.row(y);
        for (int x = 0; x < w; ++x, p += 4) {
            p[0] = static_cast<std::uint8_t>((x * 7 + y * 3 + salt) & 0xFF);
            p[1] = static_cast<std::uint8_t>((x * 2 + y * 11) & 0xFF);
            p[2] = static_cast<std::uint8_t>((x + y) & 0xFF);
            p[3] = 255;
        }
    }
    return img;
}

double time_ms(const std::function<void()>& fn, int reps) {
    // One warmup, then the best of `reps`.
    fn();
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        fn();
        const double ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                .count();
        if (ms < best) best = ms;
    }
    return best;
}

void row(const char* name, double serial_ms, double parallel_ms, bool equal) {
    std::printf("%-28s %10.2f %10.2f %9.2fx   %s\n", name, serial_ms, parallel_ms,
                parallel_ms > 0 ? serial_ms / parallel_ms : 0.0, equal ? "bytes equal" : "MISMATCH");
}

} // namespace

int main(int argc, char** argv) {
    const int reps = argc > 1 ? std::atoi(argv[1]) : 3;
    std::printf("kernel benchmark: serial reference vs OpenMP (%s, best of %d)\n",
                par::openmp_enabled() ? "OpenMP enabled" : "OpenMP NOT compiled in", reps);
    std::printf("%-28s %10s %10s %10s\n", "kernel", "serial", "openmp", "speedup");

    const Raster poster = pattern(1080, 1920, 1);
    const Raster photo = pattern(614, 921, 2);

    {
        Raster a(1080, 1920, 3), b(1080, 1920, 3);
        const double s = time_ms([&] { kern::fill_rgb_serial(a, Rgb{250, 250, 250}); }, reps);
        const double p = time_ms([&] { kern::fill_rgb_parallel(b, Rgb{250, 250, 250}); }, reps);
        row("fill 1080x1920", s, p, a == b);
    }
    {
        Raster rs, rp;
        const double s =
            time_ms([&] { rs = kern::resample_bilinear_serial(photo, 1228, 1842); }, reps);
        const double p =
            time_ms([&] { rp = kern::resample_bilinear_parallel(photo, 1228, 1842); }, reps);
        row("resample 614x921->1228x1842", s, p, rs == rp);
    }
    {
        Raster a(1080, 1920, 3, 255), b(1080, 1920, 3, 255);
        const double s = time_ms([&] { kern::blend_patch_serial(a, photo, -78, 378); }, reps);
        const double p = time_ms([&] { kern::blend_patch_parallel(b, photo, -78, 378); }, reps);
        row("alpha blend 614x921", s, p, a == b);
    }
    FloatPlane gs, gp;
    {
        const double s = time_ms([&] { gs = kern::to_grayscale_serial(poster); }, reps);
        const double p = time_ms([&] { gp = kern::to_grayscale_parallel(poster); }, reps);
        row("grayscale 1080x1920", s, p, gs.data() == gp.data());
    }
    {
        FloatPlane ds, dp;
        const double s = time_ms([&] { ds = kern::gradient_magnitude_serial(gs); }, reps);
        const double p = time_ms([&] { dp = kern::gradient_magnitude_parallel(gs); }, reps);
        row("gradient 1080x1920", s, p, ds.data() == dp.data());
    }
    {
        FloatPlane bs, bp;
        const double s = time_ms([&] { bs = kern::gaussian_blur_serial(gs, 11, 4.0); }, reps);
        const double p = time_ms([&] { bp = kern::gaussian_blur_parallel(gs, 11, 4.0); }, reps);
        row("gaussian 11x11 1080x1920", s, p, bs.data() == bp.data());
    }
    {
        FloatPlane ss, sp;
        const double s = time_ms([&] { ss = spectral_residual_saliency_serial(poster); }, reps);
        const double p =
            time_ms([&] { sp = spectral_residual_saliency_parallel(poster); }, reps);
        row("spectral saliency 1080x1920", s, p, ss.data() == sp.data());
    }
    {
        const std::vector<BBox> boxes = {{0, 0, 540, 1920}, {270, 480, 540, 960},
                                         {100, 1500, 800, 300}};
        const auto mask = kern::union_mask(boxes, 1080, 1920);
        kern::MaskedSum ms_s{}, ms_p{};
        const double s = time_ms([&] { ms_s = kern::masked_sum_serial(gs, mask); }, reps);
        const double p = time_ms([&] { ms_p = kern::masked_sum_parallel(gs, mask); }, reps);
        row("masked sum 1080x1920", s, p,
            ms_s.sum == ms_p.sum && ms_s.count == ms_p.count);
    }
    return 0;
}
