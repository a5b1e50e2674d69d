// model.hpp
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dcomp/geometry.hpp"
#include "dcomp/raster.hpp"

namespace dcomp {

struct Canvas {
    int width = 0;
    int height = 0;
    Rgb background_color{255, 255, 255};
    bool operator==(const Canvas&) const = default;
};

enum class Modality { Image, Text };

/// The five semantic layers, in placement order. The enum value is the
/// placement index: layer i is baked into canvas state G_i.
enum class SemanticRole : int {
    Background = 1,
    Underlay = 2,
    LogoImage = 3,
    Text = 4,
    Embellishment = 5,
};

inline constexpr std::array<SemanticRole, 5> kLayerOrder = {
    SemanticRole::Background, SemanticRole::Underlay, SemanticRole::LogoImage,
    SemanticRole::Text, SemanticRole::Embellishment};

/// Layer name as it appears on the wire ("logo/image" for LogoImage).
std::string_view role_name(SemanticRole role);
std::optional<SemanticRole> role_from_name(std::string_view name);
inline int role_index(SemanticRole role) { return static_cast<int>(role); }

/// One input asset: either a raster (with alpha) or a text string.
struct Element {
    std::string id;
    Modality modality = Modality::Image;
    std::shared_ptr<const Raster> image_content;  // present iff modality == Image
    std::string text_content;                     // present iff modality == Text
    int intrinsic_width = 0;
    int intrinsic_height = 0;

    bool is_text() const { return modality == Modality::Text; }
};

Element make_image_element(std::string id, Raster image);
Element make_text_element(std::string id, std::string text);

enum class TextAlign { Left, Center, Right };

std::string_view text_align_name(TextAlign a);
std::optional<TextAlign> text_align_from_name(std::string_view name);

struct TextAttributes {
    double angle = 0.0;  // degrees, counter-clockwise, about the bbox center
    std::string font;
    int font_size = 0;  // px
    Rgb color{0, 0, 0};
    TextAlign text_align = TextAlign::Left;
    bool capitalize = false;
    double letter_spacing = 0.0;  // px added between glyphs
    double line_height = 1.0;     // multiplier on font_size
    bool operator==(const TextAttributes&) const = default;
};

struct ElementAttributes {
    std::string element_id;
    int index = 0;  // per-design serialization index
    BBox bbox;
    std::optional<TextAttributes> text;  // present iff the element is text
    bool operator==(const ElementAttributes&) const = default;
};

/// Assignment of every element to one semantic layer, with a stable
/// within-layer order (the serialization order).
struct LayerPlan {
    std::map<std::string, SemanticRole> assignment;
    std::array<std::vector<std::string>, 5> ordering;  // indexed by role_index-1

    std::vector<std::string>& layer(SemanticRole role) { return ordering[role_index(role) - 1]; }
    const std::vector<std::string>& layer(SemanticRole role) const {
        return ordering[role_index(role) - 1];
    }
    std::optional<SemanticRole> role_of(const std::string& id) const;
    void assign(const std::string& id, SemanticRole role);
    std::size_t size() const { return assignment.size(); }
};

struct Design {
    Canvas canvas;
    std::vector<Element> elements;
    LayerPlan plan;
    std::map<std::string, ElementAttributes> attributes;
    std::string id;

    const Element* find_element(const std::string& id) const;
    const ElementAttributes* find_attributes(const std::string& id) const;
};

/// Intermediate canvas state G_level: layers 1..level rendered onto the
/// blank canvas. level 0 is the empty canvas.
struct CanvasState {
    int level = 0;
    Raster image;

    /// Roles whose placement index is <= level (empty for G0).
    std::vector<SemanticRole> baked_layers() const {
        std::vector<SemanticRole> out;
        for (SemanticRole r : kLayerOrder)
            if (role_index(r) <= level) out.push_back(r);
        return out;
    }
};

struct Violation {
    std::string element_id;
    std::string rule;  // e.g. "MissingTextAttrs", "DuplicateIndex"
    std::string detail;
};

/// Pure invariant check over a design; violations are data, not failures.
std::vector<Violation> validate_design(const Design& d);

/// Element ids in plan order: layers in placement order, within-layer order
/// as stored in the plan.
std::vector<std::string> plan_ordered_ids(const LayerPlan& plan);

} // namespace dcomp
