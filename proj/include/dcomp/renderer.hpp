// renderer.hpp
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <stdexcept>
#include <string>

#include "dcomp/font.hpp"
#include "dcomp/model.hpp"
#include "dcomp/raster.hpp"
#include "dcomp/text_layout.hpp"

namespace dcomp {

struct RenderError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RenderOptions {
    bool antialias = true;  // glyph edges; turn off for pixel-exact goldens
};

/// Blank canvas G0: background color fill, RGB.
Raster blank_canvas(const Canvas& canvas);

/// Resample the element bitmap to the bbox size (bilinear) and alpha-blend
/// it over the target, clipped at the canvas bounds. Zero-area boxes draw
/// nothing.
void draw_image(Raster& target, const Element& element, const BBox& bbox);

/// Rasterize laid-out text in attrs.color. Families missing from the store
/// render with the fallback face (the store reports the substitution).
void render_text(Raster& target, const Element& element, const TextAttributes& attrs,
                 const BBox& bbox, const FontStore& store, const RenderOptions& opts = {});

/// Composite layers 1..upto in placement order onto the blank canvas.
/// Throws RenderError("MissingAttributes(...)") when an element in range
/// has no attribute record.
CanvasState render_state(const Design& design, int upto, const FontStore& store,
                         const RenderOptions& opts = {});

/// Composite exactly one layer onto an existing state image (the
/// incremental step render_state is built from).
void composite_layer(Raster& target, const Design& design, SemanticRole role,
                     const FontStore& store, const RenderOptions& opts = {});

/// Composite a single attributed element.
void composite_element(Raster& target, const Element& element, const ElementAttributes& attrs,
                       const FontStore& store, const RenderOptions& opts = {});

/// Coverage raster (alpha only) of one glyph outline under scale/rotation;
/// used internally and by the glyph tests.
struct GlyphRaster {
    int left = 0, top = 0;  // placement of the patch on the canvas
    Raster patch;           // RGBA, color filled, alpha = coverage
};
GlyphRaster rasterize_glyph(const TrueTypeFace& face, std::uint16_t glyph, double scale,
                            double origin_x, double origin_y, double angle_deg,
                            double center_x, double center_y, Rgb color, bool antialias);

} // namespace dcomp
