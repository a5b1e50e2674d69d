// planner.hpp
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "dcomp/model.hpp"
#include "dcomp/protocol.hpp"

namespace dcomp {

enum class PlannerMode { Heuristic, Remote, RemoteWithFallback };

struct PlannerError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Tunable rule thresholds, centralized so calibration touches one place.
struct HeuristicThresholds {
    double background_area_ratio = 0.70;   // intrinsic area / canvas area
    double underlay_max_stddev = 12.0 / 255.0;  // per-channel, opaque pixels
    double embellishment_area_ratio = 0.02;
    int opaque_alpha = 128;  // footprint membership cutoff
};

struct LabelingRequest {
    std::shared_ptr<const Raster> element_image;
    // Training context: present only when a ground-truth design exists.
    std::shared_ptr<const Raster> design_raster;
    int canvas_width = 0, canvas_height = 0;
    int element_width = 0, element_height = 0;
    bool has_context() const { return design_raster != nullptr; }
};

struct LabelingPrompt {
    std::string text;               // contains <image> placeholders
    std::vector<ImageSlot> images;  // bound in placeholder order
};

/// The element labeling prompt, with the training-sample addendum when the
/// request carries a design raster.
LabelingPrompt build_labeling_prompt(const LabelingRequest& req);

/// Case-insensitive match after trimming; "Logo/Image", "Logo" and "Image"
/// all map to LogoImage. Throws PlannerError on anything else.
SemanticRole parse_label(const std::string& response);

/// Ordered rules: big enough -> Background; flat color + rectangular alpha
/// footprint -> Underlay; tiny -> Embellishment; else LogoImage.
SemanticRole heuristic_label(const Element& e, const Canvas& canvas,
                             const HeuristicThresholds& th = {});
/// Same, also reporting which rule fired (for CLI rationale output).
std::pair<SemanticRole, std::string> heuristic_label_explain(
    const Element& e, const Canvas& canvas, const HeuristicThresholds& th = {});

/// Sends a labeling prompt to the remote model and returns its raw text.
/// Must be safe to call concurrently.
using RemoteLabelFn = std::function<std::string(const LabelingPrompt&)>;

struct PlanResult {
    LayerPlan plan;
    std::map<std::string, std::string> rationale;  // element id -> rule / label source
};

/// Total assignment: text elements always get the Text role; visual
/// elements are labeled per mode. Within-layer order preserves input
/// order. Multiple backgrounds resolve to the largest intrinsic area
/// (ties to the earliest), the rest demoted to LogoImage.
PlanResult plan_layers_detailed(const std::vector<Element>& elements, const Canvas& canvas,
                                PlannerMode mode, const RemoteLabelFn& remote = {},
                                const HeuristicThresholds& th = {});

LayerPlan plan_layers(const std::vector<Element>& elements, const Canvas& canvas,
                      PlannerMode mode, const RemoteLabelFn& remote = {},
                      const HeuristicThresholds& th = {});

} // namespace dcomp
