// raster.cpp
// SPDX-License-Identifier: Apache-2.0
#include "dcomp/raster.hpp"

namespace dcomp {

Raster::Raster(int w, int h, int channels, std::uint8_t fill)
    : w_(w), h_(h), c_(channels),
      data_(static_cast<std::size_t>(w) * h * channels, fill) {}

Raster solid_raster(int w, int h, Rgb color, std::uint8_t alpha) {
    Raster r(w, h, 4);
    for (int y = 0; y < h; ++y) {
        std::uint8_t* p = r.row(y);
        for (int x = 0; x < w; ++x, p += 4) {
            p[0] = color.r;
            p[1] = color.g;
            p[2] = color.b;
            p[3] = alpha;
        }
    }
    return r;
}

} // namespace dcomp
