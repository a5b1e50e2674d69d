// renderer.cpp
// SPDX-License-Identifier: Apache-2.0
#include "dcomp/renderer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "dcomp/kernels.hpp"

namespace dcomp {

Raster blank_canvas(const Canvas& canvas) {
    Raster img(canvas.width, canvas.height, 3);
    kern::fill_rgb(img, canvas.background_color);
    return img;
}

void draw_image(Raster& target, const Element& element, const BBox& bbox) {
    if (element.modality != Modality::Image || !element.image_content)
        throw RenderError("draw_image: element " + element.id + " has no raster content");
    if (bbox.width <= 0 || bbox.height <= 0) return;
    if (bbox.right() <= 0 || bbox.bottom() <= 0 || bbox.left >= target.width() ||
        bbox.top >= target.height())
        return;
    kern::blend_resampled(target, *element.image_content, bbox);
}

namespace {

struct DevEdge {
    double x0, y0, x1, y1;
};

struct DevPoint {
    double x, y;
};

void flatten_quad(std::vector<DevEdge>& edges, DevPoint p0, DevPoint c, DevPoint p1) {
    const double dev_x = p0.x - 2 * c.x + p1.x;
    const double dev_y = p0.y - 2 * c.y + p1.y;
    const double dev = std::sqrt(dev_x * dev_x + dev_y * dev_y) / 4.0;
    const int n = std::clamp(static_cast<int>(std::ceil(std::sqrt(dev / 0.2))), 1, 32);
    DevPoint prev = p0;
    for (int i = 1; i <= n; ++i) {
        const double t = static_cast<double>(i) / n;
        const double mt = 1.0 - t;
        DevPoint q{mt * mt * p0.x + 2 * mt * t * c.x + t * t * p1.x,
                   mt * mt * p0.y + 2 * mt * t * c.y + t * t * p1.y};
        edges.push_back({prev.x, prev.y, q.x, q.y});
        prev = q;
    }
}

/// Nonzero-winding scanline fill of device-space edges into a coverage
/// patch, `samples` sub-samples per axis (1 = no antialiasing).
GlyphRaster fill_edges(const std::vector<DevEdge>& edges, Rgb color, int samples) {
    GlyphRaster out;
    if (edges.empty()) return out;

    double min_x = edges[0].x0, max_x = edges[0].x0;
    double min_y = edges[0].y0, max_y = edges[0].y0;
    for (const DevEdge& e : edges) {
        min_x = std::min({min_x, e.x0, e.x1});
        max_x = std::max({max_x, e.x0, e.x1});
        min_y = std::min({min_y, e.y0, e.y1});
        max_y = std::max({max_y, e.y0, e.y1});
    }
    const int left = static_cast<int>(std::floor(min_x));
    const int top = static_cast<int>(std::floor(min_y));
    const int w = static_cast<int>(std::ceil(max_x)) - left + 1;
    const int h = static_cast<int>(std::ceil(max_y)) - top + 1;
    if (w <= 0 || h <= 0 || w > 1 << 15 || h > 1 << 15) return out;

    const int s = samples;
    std::vector<std::uint16_t> coverage(static_cast<std::size_t>(w) * h, 0);

    struct Crossing {
        double x;
        int dir;
    };
    std::vector<Crossing> crossings;
    for (int row = 0; row < h * s; ++row) {
        const double ys = top + (row + 0.5) / s;
        crossings.clear();
        for (const DevEdge& e : edges) {
            if (e.y0 == e.y1) continue;
            const double lo = std::min(e.y0, e.y1), hi = std::max(e.y0, e.y1);
            if (ys < lo || ys >= hi) continue;
            const double t = (ys - e.y0) / (e.y1 - e.y0);
            crossings.push_back({e.x0 + t * (e.x1 - e.x0), e.y1 > e.y0 ? 1 : -1});
        }
        if (crossings.empty()) continue;
        std::sort(crossings.begin(), crossings.end(),
                  [](const Crossing& a, const Crossing& b) { return a.x < b.x; });
        int winding = 0;
        double span_start = 0;
        std::uint16_t* cov_row = coverage.data() + static_cast<std::size_t>(row / s) * w;
        for (const Crossing& cr : crossings) {
            const int before = winding;
            winding += cr.dir;
            if (before == 0 && winding != 0) {
                span_start = cr.x;
            } else if (before != 0 && winding == 0) {
                int ia = static_cast<int>(std::ceil((span_start - left) * s - 0.5));
                int ib = static_cast<int>(std::ceil((cr.x - left) * s - 0.5));
                ia = std::max(ia, 0);
                ib = std::min(ib, w * s);
                for (int k = ia; k < ib; ++k) ++cov_row[k / s];
            }
        }
    }

    out.left = left;
    out.top = top;
    out.patch = Raster(w, h, 4);
    const int denom = s * s;
    for (int y = 0; y < h; ++y) {
        std::uint8_t* p = out.patch.row(y);
        const std::uint16_t* c = coverage.data() + static_cast<std::size_t>(y) * w;
        for (int x = 0; x < w; ++x, p += 4) {
            p[0] = color.r;
            p[1] = color.g;
            p[2] = color.b;
            p[3] = static_cast<std::uint8_t>(std::min(255, c[x] * 255 / denom));
        }
    }
    return out;
}

} // namespace

GlyphRaster rasterize_glyph(const TrueTypeFace& face, std::uint16_t glyph, double scale,
                            double origin_x, double origin_y, double angle_deg,
                            double center_x, double center_y, Rgb color, bool antialias) {
    const auto contours = face.glyph_outline(glyph);
    if (contours.empty()) return {};

    const double theta = angle_deg * std::numbers::pi / 180.0;
    const double ct = std::cos(theta), st = std::sin(theta);
    auto device = [&](double ux, double uy) {
        // Font units (y up) to canvas px (y down), then rotate CCW about the
        // block center.
        const double px = origin_x + scale * ux;
        const double py = origin_y - scale * uy;
        const double dx = px - center_x, dy = py - center_y;
        return DevPoint{center_x + dx * ct + dy * st, center_y - dx * st + dy * ct};
    };

    std::vector<DevEdge> edges;
    for (const GlyphContour& contour : contours) {
        for (const OutlineSegment& seg : contour) {
            const DevPoint a = device(seg.x0, seg.y0);
            const DevPoint b = device(seg.x1, seg.y1);
            if (seg.has_control)
                flatten_quad(edges, a, device(seg.cx, seg.cy), b);
            else
                edges.push_back({a.x, a.y, b.x, b.y});
        }
    }
    return fill_edges(edges, color, antialias ? 4 : 1);
}

void render_text(Raster& target, const Element& element, const TextAttributes& attrs,
                 const BBox& bbox, const FontStore& store, const RenderOptions& opts) {
    if (element.modality != Modality::Text)
        throw RenderError("render_text: element " + element.id + " is not text");
    const TrueTypeFace& face = store.face(attrs.font);
    const TextLayout layout = layout_text(element.text_content, attrs, bbox, face);
    for (const GlyphPlacement& g : layout.glyphs) {
        if (g.glyph == 0 && g.codepoint == ' ') continue;
        GlyphRaster gr = rasterize_glyph(face, g.glyph, layout.scale, g.x, g.y,
                                         layout.angle_deg, layout.center_x, layout.center_y,
                                         attrs.color, opts.antialias);
        if (!gr.patch.empty()) kern::blend_patch(target, gr.patch, gr.left, gr.top);
    }
}

void composite_element(Raster& target, const Element& element, const ElementAttributes& attrs,
                       const FontStore& store, const RenderOptions& opts) {
    if (element.modality == Modality::Image) {
        draw_image(target, element, attrs.bbox);
    } else {
        if (!attrs.text)
            throw RenderError("MissingAttributes(" + element.id + "): text attributes");
        render_text(target, element, *attrs.text, attrs.bbox, store, opts);
    }
}

void composite_layer(Raster& target, const Design& design, SemanticRole role,
                     const FontStore& store, const RenderOptions& opts) {
    for (const std::string& id : design.plan.layer(role)) {
        const ElementAttributes* attrs = design.find_attributes(id);
        if (!attrs) throw RenderError("MissingAttributes(" + id + ")");
        const Element* e = design.find_element(id);
        if (!e) throw RenderError("render: unknown element " + id);
        composite_element(target, *e, *attrs, store, opts);
    }
}

CanvasState render_state(const Design& design, int upto, const FontStore& store,
                         const RenderOptions& opts) {
    if (upto < 0 || upto > 5) throw RenderError("render_state: level out of range");
    CanvasState state;
    state.level = upto;
    state.image = blank_canvas(design.canvas);
    for (SemanticRole role : kLayerOrder) {
        if (role_index(role) > upto) break;
        composite_layer(state.image, design, role, store, opts);
    }
    return state;
}

} // namespace dcomp
