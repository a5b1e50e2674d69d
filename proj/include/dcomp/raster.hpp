// raster.hpp
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <cstddef>
#include <vector>

namespace dcomp {

struct Rgb {
    std::uint8_t r = 0, g = 0, b = 0;
    bool operator==(const Rgb&) const = default;
};

/// Interleaved 8-bit raster, 1 (gray), 3 (RGB) or 4 (RGBA) channels.
class Raster {
public:
    Raster() = default;
    Raster(int w, int h, int channels, std::uint8_t fill = 0);

    int width() const { return w_; }
    int height() const { return h_; }
    int channels() const { return c_; }
    bool empty() const { return data_.empty(); }

    std::uint8_t* row(int y) { return data_.data() + static_cast<std::size_t>(y) * w_ * c_; }
    const std::uint8_t* row(int y) const { return data_.data() + static_cast<std::size_t>(y) * w_ * c_; }
    std::uint8_t* px(int x, int y) { return row(y) + static_cast<std::size_t>(x) * c_; }
    const std::uint8_t* px(int x, int y) const { return row(y) + static_cast<std::size_t>(x) * c_; }

    std::vector<std::uint8_t>& data() { return data_; }
    const std::vector<std::uint8_t>& data() const { return data_; }

    bool operator==(const Raster&) const = default;

private:
    int w_ = 0, h_ = 0, c_ = 0;
    std::vector<std::uint8_t> data_;
};

/// Single-channel float plane, used for saliency maps and grayscale work buffers.
class FloatPlane {
public:
    FloatPlane() = default;
    FloatPlane(int w, int h, float fill = 0.f)
        : w_(w), h_(h), data_(static_cast<std::size_t>(w) * h, fill) {}

    int width() const { return w_; }
    int height() const { return h_; }
    bool empty() const { return data_.empty(); }

    float& at(int x, int y) { return data_[static_cast<std::size_t>(y) * w_ + x]; }
    float at(int x, int y) const { return data_[static_cast<std::size_t>(y) * w_ + x]; }

    std::vector<float>& data() { return data_; }
    const std::vector<float>& data() const { return data_; }

private:
    int w_ = 0, h_ = 0;
    std::vector<float> data_;
};

Raster solid_raster(int w, int h, Rgb color, std::uint8_t alpha = 255);

} // namespace dcomp
