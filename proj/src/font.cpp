// font.cpp
// SPDX-License-Identifier: Apache-2.0
#include "dcomp/font.hpp"

#include <cstring>
#include <filesystem>
#include <fstream>

namespace dcomp {

namespace {

struct Reader {
    const std::uint8_t* p;
    std::size_t len;
    std::size_t pos = 0;

    void require(std::size_t n) const {
        if (pos + n > len) throw FontError("font: table read out of bounds");
    }
    std::uint8_t u8() {
        require(1);
        return p[pos++];
    }
    std::uint16_t u16() {
        require(2);
        std::uint16_t v = (std::uint16_t(p[pos]) << 8) | p[pos + 1];
        pos += 2;
        return v;
    }
    std::int16_t s16() { return static_cast<std::int16_t>(u16()); }
    std::uint32_t u32() {
        require(4);
        std::uint32_t v = (std::uint32_t(p[pos]) << 24) | (std::uint32_t(p[pos + 1]) << 16) |
                          (std::uint32_t(p[pos + 2]) << 8) | p[pos + 3];
        pos += 4;
        return v;
    }
    void skip(std::size_t n) {
        require(n);
        pos += n;
    }
    void seek(std::size_t off) {
        if (off > len) throw FontError("font: seek out of bounds");
        pos = off;
    }
};

struct GlyphPoint {
    double x, y;
    bool on_curve;
};

// Emits quadratic segments for one closed TrueType contour.
void contour_to_segments(const std::vector<GlyphPoint>& pts, GlyphContour& out) {
    const std::size_t n = pts.size();
    if (n < 2) return;

    // Start at an on-curve point; if none exists, start at the implied
    // midpoint between the last and first control points.
    std::size_t start = n;
    for (std::size_t i = 0; i < n; ++i)
        if (pts[i].on_curve) {
            start = i;
            break;
        }
    GlyphPoint first{};
    if (start == n) {
        first = {(pts[n - 1].x + pts[0].x) / 2, (pts[n - 1].y + pts[0].y) / 2, true};
        start = 0;
    } else {
        first = pts[start];
        start = (start + 1) % n;
    }

    GlyphPoint prev_on = first;
    bool have_ctrl = false;
    GlyphPoint ctrl{};
    for (std::size_t k = 0; k < n; ++k) {
        const GlyphPoint& pt = pts[(start + k) % n];
        if (pt.on_curve) {
            if (have_ctrl) {
                out.push_back({prev_on.x, prev_on.y, ctrl.x, ctrl.y, pt.x, pt.y, true});
                have_ctrl = false;
            } else {
                out.push_back({prev_on.x, prev_on.y, 0, 0, pt.x, pt.y, false});
            }
            prev_on = pt;
        } else {
            if (have_ctrl) {
                // Two consecutive control points: implied on-curve midpoint.
                GlyphPoint mid{(ctrl.x + pt.x) / 2, (ctrl.y + pt.y) / 2, true};
                out.push_back({prev_on.x, prev_on.y, ctrl.x, ctrl.y, mid.x, mid.y, true});
                prev_on = mid;
            }
            ctrl = pt;
            have_ctrl = true;
        }
    }
    // Close back to the first point.
    if (have_ctrl)
        out.push_back({prev_on.x, prev_on.y, ctrl.x, ctrl.y, first.x, first.y, true});
    else if (prev_on.x != first.x || prev_on.y != first.y)
        out.push_back({prev_on.x, prev_on.y, 0, 0, first.x, first.y, false});
}

} // namespace

TrueTypeFace TrueTypeFace::load_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw FontError("font: cannot open " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                                    std::istreambuf_iterator<char>());
    if (bytes.empty()) throw FontError("font: empty file " + path);
    return load_memory(std::move(bytes));
}

TrueTypeFace TrueTypeFace::load_memory(std::vector<std::uint8_t> bytes) {
    TrueTypeFace face;
    face.data_ = std::move(bytes);
    face.parse();
    return face;
}

void TrueTypeFace::parse() {
    Reader r{data_.data(), data_.size()};
    const std::uint32_t scaler = r.u32();
    if (scaler != 0x00010000 && scaler != 0x74727565)  // 'true'
        throw FontError("font: not a TrueType file");
    const std::uint16_t num_tables = r.u16();
    r.skip(6);

    std::uint32_t head_off = 0, hhea_off = 0, maxp_off = 0;
    for (int i = 0; i < num_tables; ++i) {
        char tag[5] = {0};
        r.require(4);
        std::memcpy(tag, r.p + r.pos, 4);
        r.skip(4);
        r.u32();  // checksum
        const std::uint32_t off = r.u32();
        const std::uint32_t len = r.u32();
        if (!std::strcmp(tag, "cmap")) cmap_off_ = off, cmap_len_ = len;
        else if (!std::strcmp(tag, "glyf")) glyf_off_ = off, glyf_len_ = len;
        else if (!std::strcmp(tag, "loca")) loca_off_ = off, loca_len_ = len;
        else if (!std::strcmp(tag, "hmtx")) hmtx_off_ = off, hmtx_len_ = len;
        else if (!std::strcmp(tag, "head")) head_off = off;
        else if (!std::strcmp(tag, "hhea")) hhea_off = off;
        else if (!std::strcmp(tag, "maxp")) maxp_off = off;
    }
    if (!cmap_off_ || !glyf_off_ || !loca_off_ || !hmtx_off_ || !head_off || !hhea_off ||
        !maxp_off)
        throw FontError("font: required table missing");

    r.seek(head_off + 18);
    units_per_em_ = r.u16();
    r.seek(head_off + 50);
    index_to_loc_format_ = r.s16();

    r.seek(hhea_off + 4);
    ascent_ = r.s16();
    descent_ = r.s16();
    line_gap_ = r.s16();
    r.seek(hhea_off + 34);
    num_hmetrics_ = r.u16();

    r.seek(maxp_off + 4);
    num_glyphs_ = r.u16();

    // Pick a usable cmap subtable: prefer (3,10) and (3,1), else platform 0.
    r.seek(cmap_off_);
    r.u16();
    const std::uint16_t n_sub = r.u16();
    std::uint32_t best = 0;
    int best_score = -1;
    for (int i = 0; i < n_sub; ++i) {
        const std::uint16_t platform = r.u16();
        const std::uint16_t encoding = r.u16();
        const std::uint32_t off = r.u32();
        int score = -1;
        if (platform == 3 && encoding == 10) score = 4;
        else if (platform == 3 && encoding == 1) score = 3;
        else if (platform == 0) score = 2;
        else if (platform == 3 && encoding == 0) score = 1;
        if (score > best_score) {
            best_score = score;
            best = off;
        }
    }
    if (best_score < 0) throw FontError("font: no usable cmap subtable");
    cmap_subtable_ = cmap_off_ + best;
}

std::uint16_t TrueTypeFace::glyph_index(std::uint32_t cp) const {
    Reader r{data_.data(), data_.size()};
    r.seek(cmap_subtable_);
    const std::uint16_t format = r.u16();
    if (format == 4) {
        if (cp > 0xFFFF) return 0;
        r.u16();  // length
        r.u16();  // language
        const std::uint16_t seg_x2 = r.u16();
        const std::uint16_t seg_count = seg_x2 / 2;
        r.skip(6);
        const std::size_t end_codes = r.pos;
        const std::size_t start_codes = end_codes + seg_x2 + 2;
        const std::size_t deltas = start_codes + seg_x2;
        const std::size_t range_offsets = deltas + seg_x2;
        auto read16at = [&](std::size_t off) {
            Reader t{data_.data(), data_.size()};
            t.seek(off);
            return t.u16();
        };
        for (std::uint16_t s = 0; s < seg_count; ++s) {
            const std::uint16_t end = read16at(end_codes + 2 * s);
            if (cp > end) continue;
            const std::uint16_t start = read16at(start_codes + 2 * s);
            if (cp < start) return 0;
            const std::uint16_t delta = read16at(deltas + 2 * s);
            const std::uint16_t range_off = read16at(range_offsets + 2 * s);
            if (range_off == 0)
                return static_cast<std::uint16_t>((cp + delta) & 0xFFFF);
            const std::size_t gi_addr =
                range_offsets + 2 * s + range_off + 2 * (cp - start);
            const std::uint16_t gi = read16at(gi_addr);
            return gi == 0 ? 0 : static_cast<std::uint16_t>((gi + delta) & 0xFFFF);
        }
        return 0;
    }
    if (format == 12) {
        r.skip(2 + 4 + 4);
        const std::uint32_t n_groups = r.u32();
        for (std::uint32_t g = 0; g < n_groups; ++g) {
            const std::uint32_t start = r.u32();
            const std::uint32_t end = r.u32();
            const std::uint32_t start_gi = r.u32();
            if (cp >= start && cp <= end)
                return static_cast<std::uint16_t>(start_gi + (cp - start));
        }
        return 0;
    }
    if (format == 6) {
        r.u16();
        r.u16();
        const std::uint16_t first = r.u16();
        const std::uint16_t count = r.u16();
        if (cp < first || cp >= std::uint32_t(first) + count) return 0;
        r.skip(2 * (cp - first));
        return r.u16();
    }
    if (format == 0) {
        r.u16();
        r.u16();
        if (cp > 255) return 0;
        r.skip(cp);
        return r.u8();
    }
    return 0;
}

int TrueTypeFace::advance_width(std::uint16_t glyph) const {
    Reader r{data_.data(), data_.size()};
    const std::uint16_t m = glyph < num_hmetrics_ ? glyph : num_hmetrics_ - 1;
    r.seek(hmtx_off_ + 4u * m);
    return r.u16();
}

std::vector<GlyphContour> TrueTypeFace::glyph_outline(std::uint16_t glyph) const {
    return outline_impl(glyph, 0);
}

std::vector<GlyphContour> TrueTypeFace::outline_impl(std::uint16_t glyph, int depth) const {
    std::vector<GlyphContour> out;
    if (glyph >= num_glyphs_ || depth > 5) return out;

    Reader r{data_.data(), data_.size()};
    std::uint32_t g_off, g_end;
    if (index_to_loc_format_ == 0) {
        r.seek(loca_off_ + 2u * glyph);
        g_off = 2u * r.u16();
        g_end = 2u * r.u16();
    } else {
        r.seek(loca_off_ + 4u * glyph);
        g_off = r.u32();
        g_end = r.u32();
    }
    if (g_end <= g_off) return out;  // empty glyph (e.g. space)

    r.seek(glyf_off_ + g_off);
    const std::int16_t n_contours = r.s16();
    r.skip(8);  // xmin..ymax

    if (n_contours >= 0) {
        std::vector<std::uint16_t> contour_ends(n_contours);
        for (auto& e : contour_ends) e = r.u16();
        const std::uint16_t n_pts = n_contours ? contour_ends.back() + 1 : 0;
        const std::uint16_t instr_len = r.u16();
        r.skip(instr_len);

        std::vector<std::uint8_t> flags;
        flags.reserve(n_pts);
        while (flags.size() < n_pts) {
            const std::uint8_t f = r.u8();
            flags.push_back(f);
            if (f & 0x08) {  // repeat
                std::uint8_t rep = r.u8();
                while (rep-- && flags.size() < n_pts) flags.push_back(f);
            }
        }
        std::vector<GlyphPoint> pts(n_pts);
        int v = 0;
        for (std::uint16_t i = 0; i < n_pts; ++i) {
            const std::uint8_t f = flags[i];
            if (f & 0x02) {
                const std::uint8_t d = r.u8();
                v += (f & 0x10) ? d : -d;
            } else if (!(f & 0x10)) {
                v += r.s16();
            }
            pts[i].x = v;
        }
        v = 0;
        for (std::uint16_t i = 0; i < n_pts; ++i) {
            const std::uint8_t f = flags[i];
            if (f & 0x04) {
                const std::uint8_t d = r.u8();
                v += (f & 0x20) ? d : -d;
            } else if (!(f & 0x20)) {
                v += r.s16();
            }
            pts[i].y = v;
            pts[i].on_curve = (f & 0x01) != 0;
        }

        std::uint16_t begin = 0;
        for (std::uint16_t end : contour_ends) {
            std::vector<GlyphPoint> contour(pts.begin() + begin, pts.begin() + end + 1);
            GlyphContour segs;
            contour_to_segments(contour, segs);
            if (!segs.empty()) out.push_back(std::move(segs));
            begin = end + 1;
        }
        return out;
    }

    // Composite glyph: transformed copies of component glyphs.
    bool more = true;
    while (more) {
        const std::uint16_t flags = r.u16();
        const std::uint16_t comp_glyph = r.u16();
        double dx = 0, dy = 0;
        if (flags & 0x0001) {  // words
            const std::int16_t a = r.s16(), b = r.s16();
            if (flags & 0x0002) dx = a, dy = b;
        } else {
            const std::int8_t a = static_cast<std::int8_t>(r.u8());
            const std::int8_t b = static_cast<std::int8_t>(r.u8());
            if (flags & 0x0002) dx = a, dy = b;
        }
        double m00 = 1, m01 = 0, m10 = 0, m11 = 1;
        auto f2dot14 = [&] { return r.s16() / 16384.0; };
        if (flags & 0x0008) {
            m00 = m11 = f2dot14();
        } else if (flags & 0x0040) {
            m00 = f2dot14();
            m11 = f2dot14();
        } else if (flags & 0x0080) {
            m00 = f2dot14();
            m01 = f2dot14();
            m10 = f2dot14();
            m11 = f2dot14();
        }
        more = (flags & 0x0020) != 0;

        auto sub = outline_impl(comp_glyph, depth + 1);
        for (auto& contour : sub) {
            for (auto& s : contour) {
                auto tx = [&](double x, double y) { return m00 * x + m10 * y + dx; };
                auto ty = [&](double x, double y) { return m01 * x + m11 * y + dy; };
                const double nx0 = tx(s.x0, s.y0), ny0 = ty(s.x0, s.y0);
                const double ncx = tx(s.cx, s.cy), ncy = ty(s.cx, s.cy);
                const double nx1 = tx(s.x1, s.y1), ny1 = ty(s.x1, s.y1);
                s.x0 = nx0, s.y0 = ny0;
                s.cx = ncx, s.cy = ncy;
                s.x1 = nx1, s.y1 = ny1;
            }
            out.push_back(std::move(contour));
        }
    }
    return out;
}

FontStore::FontStore(std::string fonts_dir, std::string fallback_path, SubstitutionSink sink)
    : dir_(std::move(fonts_dir)), sink_(std::move(sink)) {
    fallback_ = std::make_shared<TrueTypeFace>(TrueTypeFace::load_file(fallback_path));
}

bool FontStore::has_family(const std::string& family) const {
    return std::filesystem::exists(std::filesystem::path(dir_) / (family + ".ttf"));
}

const TrueTypeFace& FontStore::face(const std::string& family) const {
    std::lock_guard lock(mu_);
    auto it = cache_.find(family);
    if (it != cache_.end()) return *it->second;

    const auto path = std::filesystem::path(dir_) / (family + ".ttf");
    std::shared_ptr<const TrueTypeFace> loaded;
    if (std::filesystem::exists(path)) {
        try {
            loaded = std::make_shared<TrueTypeFace>(TrueTypeFace::load_file(path.string()));
        } catch (const FontError&) {
            loaded = nullptr;
        }
    }
    if (!loaded) {
        if (sink_) sink_(family);
        loaded = fallback_;
    }
    cache_.emplace(family, loaded);
    return *loaded;
}

} // namespace dcomp
