// png_io.hpp
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "dcomp/raster.hpp"

namespace dcomp::png {

struct PngError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Deterministic encoder: fixed filter (none) and fixed deflate settings,
/// so identical rasters always produce identical bytes.
std::vector<std::uint8_t> encode(const Raster& img);
void write_file(const std::string& path, const Raster& img);

/// Decodes 8-bit gray / gray+alpha / RGB / RGBA / palette, non-interlaced.
/// Gray maps to 1 channel, palette to 3, gray+alpha to 4.
Raster decode(const std::uint8_t* data, std::size_t size);
Raster read_file(const std::string& path);

} // namespace dcomp::png
