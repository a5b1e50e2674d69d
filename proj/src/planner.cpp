// planner.cpp
// SPDX-License-Identifier: Apache-2.0
#include "dcomp/planner.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace dcomp {

namespace {

constexpr const char* kPromptHeader =
    "You are an excellent graphic designer. Your task is to determine the role of the given "
    "element, which is rendered as an image. There are 4 possible options: Background, "
    "Underlay, Logo/Image or Embellishment. Please refer to the detailed descriptions below "
    "to make your prediction.\n"
    "\n"
    "Background: The foundational layer of the design, typically large in size and covering "
    "the entire canvas. It may consist of a solid color, gradient, landscape image, or "
    "similar visual foundation.\n"
    "\n"
    "Underlay: A supportive layer placed beneath key content, often used to create contrast "
    "or highlight the main design elements, such as borders, buttons, color overlays, and so "
    "on.\n"
    "\n"
    "Logo/Image: A core visual element that represents a brand, product, or entity. It "
    "combines both imagery and logo elements to capture attention and convey the primary "
    "message.\n"
    "\n"
    "Embellishment: Decorative elements that enhance visual appeal without conveying core "
    "information. These elements add style to the design. Note that they are usually small "
    "in size.\n"
    "\n"
    "When you respond, please output only one word from the 4 options. Do not include any "
    "additional explanations or irrelevant information.\n"
    "\n";

std::string trimmed(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::string lowered(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return s;
}

struct PixelStats {
    double stddev_r = 0, stddev_g = 0, stddev_b = 0;
    bool rectangular_footprint = false;
    bool any_opaque = false;
};

PixelStats opaque_pixel_stats(const Raster& img, int opaque_alpha) {
    PixelStats st;
    const int c = img.channels();
    double sum[3] = {0, 0, 0}, sq[3] = {0, 0, 0};
    std::int64_t n = 0;
    int min_x = img.width(), max_x = -1, min_y = img.height(), max_y = -1;
    for (int y = 0; y < img.height(); ++y) {
        const std::uint8_t* p = img.row(y);
        for (int x = 0; x < img.width(); ++x, p += c) {
            const int a = c == 4 ? p[3] : 255;
            if (a < opaque_alpha) continue;
            ++n;
            min_x = std::min(min_x, x);
            max_x = std::max(max_x, x);
            min_y = std::min(min_y, y);
            max_y = std::max(max_y, y);
            for (int k = 0; k < 3; ++k) {
                const double v = (c == 1 ? p[0] : p[k]) / 255.0;
                sum[k] += v;
                sq[k] += v * v;
            }
        }
    }
    if (n == 0) return st;
    st.any_opaque = true;
    auto dev = [&](int k) {
        const double mean = sum[k] / n;
        return std::sqrt(std::max(0.0, sq[k] / n - mean * mean));
    };
    st.stddev_r = dev(0);
    st.stddev_g = dev(1);
    st.stddev_b = dev(2);
    const std::int64_t bbox_area =
        static_cast<std::int64_t>(max_x - min_x + 1) * (max_y - min_y + 1);
    st.rectangular_footprint = n == bbox_area;
    return st;
}

} // namespace

LabelingPrompt build_labeling_prompt(const LabelingRequest& req) {
    LabelingPrompt p;
    p.text = kPromptHeader;
    if (req.has_context()) {
        p.text += "The overall design is <image>. The canvas width is " +
                  std::to_string(req.canvas_width) + "px, canvas height is " +
                  std::to_string(req.canvas_height) +
                  "px. The element is <image>. The element width is " +
                  std::to_string(req.element_width) + "px, element height is " +
                  std::to_string(req.element_height) +
                  "px. Please also consider the provided canvas and element width/height, as "
                  "they might be helpful in making a decision. Please predict the given "
                  "element role: ";
        p.images.push_back({"design", req.design_raster});
        p.images.push_back({"element", req.element_image});
    } else {
        p.text += "The element is <image>. Please predict the given element role: ";
        p.images.push_back({"element", req.element_image});
    }
    return p;
}

SemanticRole parse_label(const std::string& response) {
    const std::string t = lowered(trimmed(response));
    if (t == "background") return SemanticRole::Background;
    if (t == "underlay") return SemanticRole::Underlay;
    if (t == "logo/image" || t == "logo" || t == "image") return SemanticRole::LogoImage;
    if (t == "embellishment") return SemanticRole::Embellishment;
    throw PlannerError("UnrecognizedLabel: \"" + response + "\"");
}

std::pair<SemanticRole, std::string> heuristic_label_explain(const Element& e,
                                                             const Canvas& canvas,
                                                             const HeuristicThresholds& th) {
    if (e.modality != Modality::Image)
        throw PlannerError("heuristic_label: element " + e.id + " is not an image");
    const double canvas_area =
        static_cast<double>(canvas.width) * static_cast<double>(canvas.height);
    const double elem_area =
        static_cast<double>(e.intrinsic_width) * static_cast<double>(e.intrinsic_height);
    const double ratio = canvas_area > 0 ? elem_area / canvas_area : 0.0;

    if (ratio >= th.background_area_ratio)
        return {SemanticRole::Background, "area-ratio " + std::to_string(ratio) + " >= background threshold"};

    if (e.image_content) {
        const PixelStats st = opaque_pixel_stats(*e.image_content, th.opaque_alpha);
        if (st.any_opaque && st.rectangular_footprint && st.stddev_r <= th.underlay_max_stddev &&
            st.stddev_g <= th.underlay_max_stddev && st.stddev_b <= th.underlay_max_stddev)
            return {SemanticRole::Underlay, "flat color with rectangular footprint"};
    }

    if (ratio <= th.embellishment_area_ratio)
        return {SemanticRole::Embellishment,
                "area-ratio " + std::to_string(ratio) + " <= embellishment threshold"};

    return {SemanticRole::LogoImage, "default visual role"};
}

SemanticRole heuristic_label(const Element& e, const Canvas& canvas,
                             const HeuristicThresholds& th) {
    return heuristic_label_explain(e, canvas, th).first;
}

PlanResult plan_layers_detailed(const std::vector<Element>& elements, const Canvas& canvas,
                                PlannerMode mode, const RemoteLabelFn& remote,
                                const HeuristicThresholds& th) {
    if (elements.empty()) throw PlannerError("plan_layers: element set is empty");
    if (mode != PlannerMode::Heuristic && !remote)
        throw PlannerError("RemoteUnavailable: no remote labeler configured");

    struct Labeled {
        SemanticRole role;
        std::string why;
    };
    std::vector<Labeled> labels(elements.size());

    for (std::size_t i = 0; i < elements.size(); ++i) {
        const Element& e = elements[i];
        if (e.is_text()) {
            labels[i] = {SemanticRole::Text, "text content"};
            continue;
        }
        switch (mode) {
            case PlannerMode::Heuristic: {
                auto [role, why] = heuristic_label_explain(e, canvas, th);
                labels[i] = {role, "heuristic: " + why};
                break;
            }
            case PlannerMode::Remote: {
                LabelingRequest req;
                req.element_image = e.image_content;
                const std::string response = remote(build_labeling_prompt(req));
                labels[i] = {parse_label(response), "remote: " + trimmed(response)};
                break;
            }
            case PlannerMode::RemoteWithFallback: {
                try {
                    LabelingRequest req;
                    req.element_image = e.image_content;
                    const std::string response = remote(build_labeling_prompt(req));
                    labels[i] = {parse_label(response), "remote: " + trimmed(response)};
                } catch (const std::exception&) {
                    auto [role, why] = heuristic_label_explain(e, canvas, th);
                    labels[i] = {role, "heuristic fallback: " + why};
                }
                break;
            }
        }
    }

    // Keep a single background: the largest intrinsic area wins, earliest on
    // ties; the rest become logo/image.
    std::size_t keep = elements.size();
    std::int64_t best_area = -1;
    for (std::size_t i = 0; i < elements.size(); ++i) {
        if (labels[i].role != SemanticRole::Background) continue;
        const std::int64_t a =
            static_cast<std::int64_t>(elements[i].intrinsic_width) * elements[i].intrinsic_height;
        if (a > best_area) {
            best_area = a;
            keep = i;
        }
    }
    for (std::size_t i = 0; i < elements.size(); ++i) {
        if (labels[i].role == SemanticRole::Background && i != keep) {
            labels[i].role = SemanticRole::LogoImage;
            labels[i].why += " (demoted: single-background rule)";
        }
    }

    PlanResult out;
    for (std::size_t i = 0; i < elements.size(); ++i) {
        out.plan.assign(elements[i].id, labels[i].role);
        out.rationale[elements[i].id] = labels[i].why;
    }
    return out;
}

LayerPlan plan_layers(const std::vector<Element>& elements, const Canvas& canvas,
                      PlannerMode mode, const RemoteLabelFn& remote,
                      const HeuristicThresholds& th) {
    return plan_layers_detailed(elements, canvas, mode, remote, th).plan;
}

} // namespace dcomp
