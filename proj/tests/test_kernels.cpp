// test_kernels.cpp
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "dcomp/kernels.hpp"
#include "dcomp/rng.hpp"
#include "testutil.hpp"

using namespace dcomp;

TEST_CASE("parallel kernels match the serial reference byte for byte") {
    const Raster src = testutil::patterned_raster(241, 173, 9);

    SUBCASE("resample") {
        CHECK(kern::resample_bilinear_serial(src, 97, 61) ==
              kern::resample_bilinear_parallel(src, 97, 61));
        CHECK(kern::resample_bilinear_serial(src, 500, 320) ==
              kern::resample_bilinear_parallel(src, 500, 320));
    }
    SUBCASE("blend") {
        Raster a(300, 200, 3, 255), b(300, 200, 3, 255);
        kern::blend_patch_serial(a, src, 20, -15);
        kern::blend_patch_parallel(b, src, 20, -15);
        CHECK(a == b);
    }
    SUBCASE("grayscale and gradient") {
        const FloatPlane gs = kern::to_grayscale_serial(src);
        const FloatPlane gp = kern::to_grayscale_parallel(src);
        CHECK(gs.data() == gp.data());
        CHECK(kern::gradient_magnitude_serial(gs).data() ==
              kern::gradient_magnitude_parallel(gs).data());
    }
    SUBCASE("plane resize, box blur, gaussian") {
        const FloatPlane g = kern::to_grayscale_serial(src);
        CHECK(kern::resize_bilinear_serial(g, 64, 64).data() ==
              kern::resize_bilinear_parallel(g, 64, 64).data());
        CHECK(kern::box_blur3_serial(g).data() == kern::box_blur3_parallel(g).data());
        CHECK(kern::gaussian_blur_serial(g, 5, 2.0).data() ==
              kern::gaussian_blur_parallel(g, 5, 2.0).data());
    }
    SUBCASE("masked reductions") {
        const FloatPlane g = kern::to_grayscale_serial(src);
        const std::vector<BBox> boxes = {{10, 10, 60, 40}, {-20, 100, 80, 200}};
        const auto mask = kern::union_mask(boxes, g.width(), g.height());
        const auto s = kern::masked_sum_serial(g, mask);
        const auto p = kern::masked_sum_parallel(g, mask);
        CHECK(s.sum == p.sum);
        CHECK(s.count == p.count);
        const auto ts = kern::threshold_counts_serial(g, mask, 0.5f);
        const auto tp = kern::threshold_counts_parallel(g, mask, 0.5f);
        CHECK(ts.below == tp.below);
        CHECK(ts.below_in_mask == tp.below_in_mask);
    }
}

TEST_CASE("alpha blend: half-transparent black over white gives mid gray") {
    Raster dst(4, 4, 3, 255);
    Raster patch(4, 4, 4);
    for (int y = 0; y < 4; ++y)
        for (int x = 0; x < 4; ++x) {
            std::uint8_t* p = patch.px(x, y);
            p[0] = p[1] = p[2] = 0;
            p[3] = 128;
        }
    kern::blend_patch(dst, patch, 0, 0);
    const int v = dst.px(1, 1)[0];
    CHECK(std::abs(v - 128) <= 1);
}

TEST_CASE("blend clips at destination bounds") {
    Raster dst(10, 10, 3, 255);
    Raster patch(10, 10, 4);
    for (int y = 0; y < 10; ++y)
        for (int x = 0; x < 10; ++x) {
            std::uint8_t* p = patch.px(x, y);
            p[0] = 200;
            p[1] = 0;
            p[2] = 0;
            p[3] = 255;
        }
    kern::blend_patch(dst, patch, -5, -5);
    CHECK(dst.px(0, 0)[0] == 200);   // painted quadrant
    CHECK(dst.px(4, 4)[0] == 200);
    CHECK(dst.px(5, 5)[0] == 255);   // untouched
    CHECK(dst.px(9, 9)[0] == 255);
}

TEST_CASE("resample reproduces a solid color exactly") {
    const Raster src = testutil::flat_raster(10, 10, Rgb{10, 200, 30});
    const Raster out = kern::resample_bilinear(src, 20, 20);
    CHECK(out.px(0, 0)[0] == 10);
    CHECK(out.px(19, 19)[1] == 200);
    CHECK(out.px(7, 13)[2] == 30);
    CHECK(out.px(7, 13)[3] == 255);
}

TEST_CASE("fused resample+blend matches the two-step route pixel for pixel") {
    DetRng rng(64);
    const Raster src = testutil::patterned_raster(37, 53, 4);
    for (int trial = 0; trial < 50; ++trial) {
        const BBox box{static_cast<int>(rng.next_below(240)) - 120,
                       static_cast<int>(rng.next_below(240)) - 120,
                       1 + static_cast<int>(rng.next_below(200)),
                       1 + static_cast<int>(rng.next_below(200))};
        Raster a(100, 100, 3, 255), b = a;
        Raster patch = kern::resample_bilinear_serial(src, box.width, box.height);
        kern::blend_patch_serial(a, patch, box.left, box.top);
        kern::blend_resampled_serial(b, src, box);
        REQUIRE(a == b);

        Raster c(100, 100, 3, 255);
        kern::blend_resampled_parallel(c, src, box);
        REQUIRE(b == c);
    }
}

TEST_CASE("fused blend stays cheap for boxes far larger than the canvas") {
    // A 40000x40000 box must not materialize a patch of that size.
    Raster dst(64, 64, 3, 255);
    const Raster src = testutil::patterned_raster(16, 16, 2);
    kern::blend_resampled(dst, src, BBox{-20000, -20000, 40000, 40000});
    CHECK(dst.px(0, 0)[0] != 255);  // something was painted
}

TEST_CASE("union mask counts exactly") {
    const std::vector<BBox> boxes = {{0, 0, 4, 4}, {2, 2, 4, 4}};
    const auto mask = kern::union_mask(boxes, 8, 8);
    int n = 0;
    for (auto b : mask) n += b != 0;
    CHECK(n == 16 + 16 - 4);
}
