// text_layout.hpp
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dcomp/font.hpp"
#include "dcomp/geometry.hpp"
#include "dcomp/model.hpp"

namespace dcomp {

/// One positioned glyph. x is the pen position at the glyph origin, y the
/// baseline, both in canvas px before the block rotation is applied.
struct GlyphPlacement {
    std::uint32_t codepoint = 0;
    std::uint16_t glyph = 0;
    double x = 0;
    double y = 0;
    int line = 0;
};

struct TextLayout {
    std::vector<GlyphPlacement> glyphs;
    double scale = 1.0;      // px per font unit
    double angle_deg = 0.0;  // counter-clockwise about the bbox center
    double center_x = 0.0;
    double center_y = 0.0;
    std::vector<double> line_advances;  // px, letter spacing included
};

/// Line layout per the composition rules: split on explicit newlines only,
/// optional upper-casing, per-line advance = sum of advances at font_size
/// plus letter_spacing between glyphs, horizontal placement by text_align
/// inside the bbox, baseline k at top + ascent + k*font_size*line_height.
/// Overflow is allowed; glyphs may extend past the bbox.
TextLayout layout_text(const std::string& text, const TextAttributes& attrs, const BBox& bbox,
                       const TrueTypeFace& face);

/// Advance of a single line at the given size/spacing, px.
double measure_line(const std::string& line, int font_size, double letter_spacing,
                    const TrueTypeFace& face);

std::vector<std::uint32_t> decode_utf8(const std::string& s);

} // namespace dcomp
