// text_layout.cpp
// SPDX-License-Identifier: Apache-2.0
#include "dcomp/text_layout.hpp"

#include <cctype>

namespace dcomp {

std::vector<std::uint32_t> decode_utf8(const std::string& s) {
    std::vector<std::uint32_t> cps;
    std::size_t i = 0;
    while (i < s.size()) {
        const unsigned char c = s[i];
        std::uint32_t cp = 0xFFFD;
        std::size_t n = 1;
        if (c < 0x80) {
            cp = c;
        } else if ((c >> 5) == 0x6 && i + 1 < s.size()) {
            cp = ((c & 0x1F) << 6) | (s[i + 1] & 0x3F);
            n = 2;
        } else if ((c >> 4) == 0xE && i + 2 < s.size()) {
            cp = ((c & 0x0F) << 12) | ((s[i + 1] & 0x3F) << 6) | (s[i + 2] & 0x3F);
            n = 3;
        } else if ((c >> 3) == 0x1E && i + 3 < s.size()) {
            cp = ((c & 0x07) << 18) | ((s[i + 1] & 0x3F) << 12) | ((s[i + 2] & 0x3F) << 6) |
                 (s[i + 3] & 0x3F);
            n = 4;
        }
        cps.push_back(cp);
        i += n;
    }
    return cps;
}

namespace {

std::uint32_t upper_cp(std::uint32_t cp) {
    if (cp < 128) return static_cast<std::uint32_t>(std::toupper(static_cast<int>(cp)));
    if (cp >= 0xE0 && cp <= 0xFE && cp != 0xF7) return cp - 0x20;  // Latin-1 letters
    return cp;
}

std::vector<std::vector<std::uint32_t>> split_lines(const std::string& text, bool capitalize) {
    std::vector<std::vector<std::uint32_t>> lines(1);
    for (std::uint32_t cp : decode_utf8(text)) {
        if (cp == '\n') {
            lines.emplace_back();
            continue;
        }
        if (cp == '\r') continue;
        lines.back().push_back(capitalize ? upper_cp(cp) : cp);
    }
    return lines;
}

} // namespace

double measure_line(const std::string& line, int font_size, double letter_spacing,
                    const TrueTypeFace& face) {
    const auto cps = decode_utf8(line);
    const double scale = static_cast<double>(font_size) / face.units_per_em();
    double adv = 0;
    for (std::size_t i = 0; i < cps.size(); ++i) {
        adv += face.advance_width(face.glyph_index(cps[i])) * scale;
        if (i + 1 < cps.size()) adv += letter_spacing;
    }
    return adv;
}

TextLayout layout_text(const std::string& text, const TextAttributes& attrs, const BBox& bbox,
                       const TrueTypeFace& face) {
    TextLayout out;
    out.scale = static_cast<double>(attrs.font_size) / face.units_per_em();
    out.angle_deg = attrs.angle;
    out.center_x = bbox.left + bbox.width / 2.0;
    out.center_y = bbox.top + bbox.height / 2.0;

    const double ascent_px = face.ascent() * out.scale;
    const double line_step = attrs.font_size * attrs.line_height;

    const auto lines = split_lines(text, attrs.capitalize);
    for (std::size_t li = 0; li < lines.size(); ++li) {
        const auto& cps = lines[li];
        double advance = 0;
        std::vector<double> pen(cps.size());
        for (std::size_t i = 0; i < cps.size(); ++i) {
            pen[i] = advance;
            advance += face.advance_width(face.glyph_index(cps[i])) * out.scale;
            if (i + 1 < cps.size()) advance += attrs.letter_spacing;
        }
        out.line_advances.push_back(advance);

        double left = bbox.left;
        if (attrs.text_align == TextAlign::Center)
            left = bbox.left + (bbox.width - advance) / 2.0;
        else if (attrs.text_align == TextAlign::Right)
            left = bbox.left + bbox.width - advance;
        const double baseline = bbox.top + ascent_px + static_cast<double>(li) * line_step;

        for (std::size_t i = 0; i < cps.size(); ++i) {
            GlyphPlacement g;
            g.codepoint = cps[i];
            g.glyph = face.glyph_index(cps[i]);
            g.x = left + pen[i];
            g.y = baseline;
            g.line = static_cast<int>(li);
            out.glyphs.push_back(g);
        }
    }
    return out;
}

} // namespace dcomp
