// geometry.cpp
// SPDX-License-Identifier: Apache-2.0
#include "dcomp/geometry.hpp"

#include <algorithm>

namespace dcomp {

std::int64_t area(const BBox& b) {
    return static_cast<std::int64_t>(b.width) * static_cast<std::int64_t>(b.height);
}

std::optional<BBox> intersect(const BBox& a, const BBox& b) {
    const int l = std::max(a.left, b.left);
    const int t = std::max(a.top, b.top);
    const int r = std::min(a.right(), b.right());
    const int bt = std::min(a.bottom(), b.bottom());
    if (r <= l || bt <= t) return std::nullopt;
    return BBox{l, t, r - l, bt - t};
}

std::optional<BBox> clip_to_canvas(const BBox& a, int w, int h) {
    return intersect(a, BBox{0, 0, w, h});
}

bool contains(const BBox& outer, const BBox& inner) {
    return inner.left >= outer.left && inner.top >= outer.top &&
           inner.right() <= outer.right() && inner.bottom() <= outer.bottom();
}

} // namespace dcomp
