// model.cpp
// SPDX-License-Identifier: Apache-2.0
#include "dcomp/model.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace dcomp {

std::string_view role_name(SemanticRole role) {
    switch (role) {
        case SemanticRole::Background: return "background";
        case SemanticRole::Underlay: return "underlay";
        case SemanticRole::LogoImage: return "logo/image";
        case SemanticRole::Text: return "text";
        case SemanticRole::Embellishment: return "embellishment";
    }
    return "unknown";
}

std::optional<SemanticRole> role_from_name(std::string_view name) {
    for (SemanticRole r : kLayerOrder)
        if (name == role_name(r)) return r;
    return std::nullopt;
}

std::string_view text_align_name(TextAlign a) {
    switch (a) {
        case TextAlign::Left: return "left";
        case TextAlign::Center: return "center";
        case TextAlign::Right: return "right";
    }
    return "left";
}

std::optional<TextAlign> text_align_from_name(std::string_view name) {
    if (name == "left") return TextAlign::Left;
    if (name == "center") return TextAlign::Center;
    if (name == "right") return TextAlign::Right;
    return std::nullopt;
}

Element make_image_element(std::string id, Raster image) {
    Element e;
    e.id = std::move(id);
    e.modality = Modality::Image;
    e.intrinsic_width = image.width();
    e.intrinsic_height = image.height();
    e.image_content = std::make_shared<Raster>(std::move(image));
    return e;
}

Element make_text_element(std::string id, std::string text) {
    Element e;
    e.id = std::move(id);
    e.modality = Modality::Text;
    e.text_content = std::move(text);
    return e;
}

std::optional<SemanticRole> LayerPlan::role_of(const std::string& id) const {
    auto it = assignment.find(id);
    if (it == assignment.end()) return std::nullopt;
    return it->second;
}

void LayerPlan::assign(const std::string& id, SemanticRole role) {
    assignment[id] = role;
    layer(role).push_back(id);
}

const Element* Design::find_element(const std::string& eid) const {
    for (const Element& e : elements)
        if (e.id == eid) return &e;
    return nullptr;
}

const ElementAttributes* Design::find_attributes(const std::string& eid) const {
    auto it = attributes.find(eid);
    return it == attributes.end() ? nullptr : &it->second;
}

std::vector<std::string> plan_ordered_ids(const LayerPlan& plan) {
    std::vector<std::string> ids;
    for (SemanticRole r : kLayerOrder)
        for (const std::string& id : plan.layer(r)) ids.push_back(id);
    return ids;
}

static bool is_blank(const std::string& s) {
    return std::all_of(s.begin(), s.end(),
                       [](unsigned char c) { return std::isspace(c) != 0; });
}

std::vector<Violation> validate_design(const Design& d) {
    std::vector<Violation> out;
    auto add = [&](const std::string& id, std::string rule, std::string detail) {
        out.push_back(Violation{id, std::move(rule), std::move(detail)});
    };

    if (d.canvas.width < 1 || d.canvas.height < 1)
        add("", "InvalidCanvas", "canvas dimensions must be >= 1");

    std::set<std::string> element_ids;
    for (const Element& e : d.elements) {
        if (!element_ids.insert(e.id).second)
            add(e.id, "DuplicateElementId", "element id appears twice");
        if (e.modality == Modality::Image) {
            if (!e.image_content) add(e.id, "MissingImageContent", "image element without raster");
            if (!e.text_content.empty()) add(e.id, "UnexpectedTextContent", "image element carries text");
        } else {
            if (e.image_content) add(e.id, "UnexpectedImageContent", "text element carries a raster");
            if (e.text_content.empty() || is_blank(e.text_content))
                add(e.id, "EmptyTextContent", "text content blank after trimming");
        }
    }

    // Plan totality and role consistency.
    std::set<std::string> planned;
    int background_count = 0;
    for (SemanticRole role : kLayerOrder) {
        for (const std::string& id : d.plan.layer(role)) {
            if (!planned.insert(id).second) add(id, "DuplicatePlanEntry", "element planned twice");
            if (!element_ids.count(id)) add(id, "UnknownPlanElement", "plan references unknown element");
            auto it = d.plan.assignment.find(id);
            if (it == d.plan.assignment.end() || it->second != role)
                add(id, "InconsistentPlan", "ordering and assignment disagree");
            if (role == SemanticRole::Background) ++background_count;
        }
    }
    for (const Element& e : d.elements) {
        auto role = d.plan.role_of(e.id);
        if (!role) {
            add(e.id, "UnplannedElement", "element missing from layer plan");
            continue;
        }
        const bool text_role = *role == SemanticRole::Text;
        if (text_role != e.is_text())
            add(e.id, "RoleModalityMismatch",
                text_role ? "text role on image element" : "visual role on text element");
    }
    if (background_count > 1)
        add("", "MultipleBackgrounds", "more than one background element");

    // Attribute coverage and per-record invariants.
    std::set<int> indices;
    for (const auto& [id, attrs] : d.attributes) {
        if (!element_ids.count(id)) add(id, "UnknownAttributeElement", "attributes for unknown element");
        if (attrs.element_id != id) add(id, "AttributeIdMismatch", "record keyed under a different id");
        if (!indices.insert(attrs.index).second)
            add(id, "DuplicateIndex", "index " + std::to_string(attrs.index) + " reused");
        if (attrs.index < 0) add(id, "NegativeIndex", "index must be >= 0");
        if (attrs.bbox.width < 0 || attrs.bbox.height < 0)
            add(id, "NegativeExtent", "bbox width/height must be >= 0");
        const Element* e = d.find_element(id);
        if (e) {
            if (e->is_text() && !attrs.text) add(id, "MissingTextAttrs", "text element without text attributes");
            if (!e->is_text() && attrs.text) add(id, "UnexpectedTextAttrs", "image element with text attributes");
        }
        if (attrs.text) {
            if (attrs.text->font_size <= 0) add(id, "InvalidFontSize", "font_size must be > 0");
            if (attrs.text->line_height <= 0) add(id, "InvalidLineHeight", "line_height must be > 0");
            if (attrs.text->letter_spacing < 0) add(id, "InvalidLetterSpacing", "letter_spacing must be >= 0");
        }
    }
    for (const Element& e : d.elements)
        if (!d.attributes.count(e.id)) add(e.id, "MissingAttributes", "element has no attribute record");

    return out;
}

} // namespace dcomp
