// geometry.hpp
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>

namespace dcomp {

/// Axis-aligned box in integer pixels. left/top may be negative
/// (elements are allowed to hang off the canvas); width/height >= 0.
struct BBox {
    int left = 0;
    int top = 0;
    int width = 0;
    int height = 0;

    int right() const { return left + width; }
    int bottom() const { return top + height; }
    bool operator==(const BBox&) const = default;
};

std::int64_t area(const BBox& b);

/// Intersection rectangle, or nullopt when the interiors are disjoint.
/// Edge or corner contact has zero area and counts as disjoint.
std::optional<BBox> intersect(const BBox& a, const BBox& b);

/// a clipped against [0,0,w,h].
std::optional<BBox> clip_to_canvas(const BBox& a, int w, int h);

bool contains(const BBox& outer, const BBox& inner);

} // namespace dcomp
