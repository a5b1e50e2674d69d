// heuristic_backend.hpp
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <mutex>

#include "dcomp/composer.hpp"

namespace dcomp {

/// Deterministic rule-based stand-in for a generative backend, used for
/// offline runs and tests. Geometry: backgrounds fill the canvas, underlays
/// are centered 90%-width plates stacked under the text block, the largest
/// image sits in the middle band with the rest in a bottom grid, text
/// stacks center-aligned near the top with a font-size ladder scaled to
/// canvas height, embellishments go to the corners. Text color flips
/// black/white on the luminance under the bbox in the current canvas state.
class HeuristicComposer : public Backend {
public:
    HeuristicComposer(std::vector<Element> roster, LayerPlan plan, const FontStore* store,
                      FontVocabulary vocab, std::uint64_t seed = 0, bool jitter = false);

    BackendCapabilities capabilities() const override { return {true, true}; }
    std::string respond(const Conversation& so_far) override;
    std::unique_ptr<Backend> with_seed(std::uint64_t seed) const override;

private:
    struct Layout {
        std::map<std::string, BBox> boxes;
        std::map<std::string, int> font_sizes;
    };
    const Layout& layout_for(const Canvas& canvas) const;
    Layout compute_layout(const Canvas& canvas) const;

    std::vector<Element> roster_;
    LayerPlan plan_;
    const FontStore* store_;
    FontVocabulary vocab_;
    std::uint64_t seed_;
    bool jitter_;

    mutable std::mutex mu_;
    mutable std::map<std::pair<int, int>, Layout> layouts_;
};

} // namespace dcomp
