// font.hpp
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

namespace dcomp {

struct FontError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// One quadratic segment of a glyph contour; straight edges have
/// has_control = false. Coordinates are font units, y up.
struct OutlineSegment {
    double x0 = 0, y0 = 0;
    double cx = 0, cy = 0;
    double x1 = 0, y1 = 0;
    bool has_control = false;
};

using GlyphContour = std::vector<OutlineSegment>;

/// Minimal TrueType face: cmap (formats 4/12/6/0), glyf/loca outlines
/// including composites, hmtx advances, head/hhea metrics.
class TrueTypeFace {
public:
    static TrueTypeFace load_file(const std::string& path);
    static TrueTypeFace load_memory(std::vector<std::uint8_t> bytes);

    int units_per_em() const { return units_per_em_; }
    int ascent() const { return ascent_; }    // font units, positive up
    int descent() const { return descent_; }  // font units, typically negative
    int line_gap() const { return line_gap_; }

    std::uint16_t glyph_index(std::uint32_t codepoint) const;
    int advance_width(std::uint16_t glyph) const;  // font units

    /// Flattened to quadratic segments; composites resolved.
    std::vector<GlyphContour> glyph_outline(std::uint16_t glyph) const;

    std::uint16_t glyph_count() const { return num_glyphs_; }

private:
    TrueTypeFace() = default;
    void parse();
    std::vector<GlyphContour> outline_impl(std::uint16_t glyph, int depth) const;

    std::vector<std::uint8_t> data_;
    std::uint32_t cmap_off_ = 0, cmap_len_ = 0;
    std::uint32_t glyf_off_ = 0, glyf_len_ = 0;
    std::uint32_t loca_off_ = 0, loca_len_ = 0;
    std::uint32_t hmtx_off_ = 0, hmtx_len_ = 0;
    std::uint32_t cmap_subtable_ = 0;
    int units_per_em_ = 1000;
    int ascent_ = 0, descent_ = 0, line_gap_ = 0;
    int index_to_loc_format_ = 0;
    std::uint16_t num_glyphs_ = 0;
    std::uint16_t num_hmetrics_ = 0;
};

/// Maps font-family names to faces backed by "<dir>/<family>.ttf", with a
/// mandatory fallback face so lookups always succeed. Substitutions are
/// reported through the sink. Thread-safe; faces are immutable once loaded.
class FontStore {
public:
    using SubstitutionSink = std::function<void(const std::string& family)>;

    FontStore(std::string fonts_dir, std::string fallback_path,
              SubstitutionSink on_substitution = {});

    /// Never fails once constructed: missing families resolve to the fallback.
    const TrueTypeFace& face(const std::string& family) const;
    bool has_family(const std::string& family) const;
    const TrueTypeFace& fallback() const { return *fallback_; }

private:
    std::string dir_;
    std::shared_ptr<const TrueTypeFace> fallback_;
    SubstitutionSink sink_;
    mutable std::mutex mu_;
    mutable std::map<std::string, std::shared_ptr<const TrueTypeFace>> cache_;
};

} // namespace dcomp
