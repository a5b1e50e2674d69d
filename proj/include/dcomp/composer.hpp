// composer.hpp
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "dcomp/font.hpp"
#include "dcomp/model.hpp"
#include "dcomp/protocol.hpp"
#include "dcomp/renderer.hpp"

namespace dcomp {

struct BackendError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct LayerFailed : std::runtime_error {
    LayerFailed(int layer_number, const std::string& why)
        : std::runtime_error("layer " + std::to_string(layer_number) + " failed: " + why),
          layer(layer_number) {}
    int layer;
};

struct BackendCapabilities {
    bool deterministic = true;
    bool supports_variants = false;
};

/// A model endpoint for the five-turn protocol. respond() is the only
/// side-effecting call; it receives the conversation so far (the last turn
/// has an empty assistant slot) and returns the assistant text for it.
class Backend {
public:
    virtual ~Backend() = default;
    virtual BackendCapabilities capabilities() const = 0;
    virtual std::string respond(const Conversation& so_far) = 0;
    /// Reseeded copy for variant sampling; null when the backend has no
    /// seed to vary (deterministic replay).
    virtual std::unique_ptr<Backend> with_seed(std::uint64_t) const { return nullptr; }
};

/// Replays canned assistant texts: turn i answers with the i-th entry,
/// selected by the number of already-answered turns in the conversation.
class ReplayBackend : public Backend {
public:
    explicit ReplayBackend(std::vector<std::string> assistant_turns)
        : turns_(std::move(assistant_turns)) {}

    BackendCapabilities capabilities() const override { return {true, false}; }
    std::string respond(const Conversation& so_far) override;

private:
    std::vector<std::string> turns_;
};

struct ComposeOptions {
    double temperature = 0.7;
    double top_p = 0.95;
    int max_parse_retries = 2;
    std::uint64_t seed = 0;
    RenderOptions render;
};

struct LayerTrace {
    int layer = 0;
    bool given = false;  // conditioned layer, no backend call
    int retries = 0;
    double respond_seconds = 0;
    double render_seconds = 0;
};

struct CompositionTrace {
    Conversation conversation;
    std::array<Raster, 6> states;  // G0..G5
    std::vector<LayerTrace> layers;
    int backend_calls = 0;
};

struct ComposeResult {
    Design design;
    CompositionTrace trace;
};

/// The composition loop: for each layer build the turn, query the backend,
/// parse the layer output (with up to max_parse_retries corrective
/// re-queries), render the new canvas state, and feed it forward.
ComposeResult compose(const std::vector<Element>& elements, const Canvas& canvas,
                      const LayerPlan& plan, Backend& backend, const FontStore& store,
                      const FontVocabulary& vocab, const ComposeOptions& opts = {});

/// Layers 1..k of `given` are already attributed: their turns are
/// synthesized with the ground-truth serializations and their attribute
/// records pass through unchanged; generation continues from layer k+1.
/// k=1 is content-aware layout generation, k=3 typography generation.
ComposeResult compose_partial(const Design& given, int given_layers, Backend& backend,
                              const FontStore& store, const FontVocabulary& vocab,
                              const ComposeOptions& opts = {});

/// n independent compositions with distinct seeds. Requires a backend that
/// samples or accepts a seed when n > 1.
std::vector<ComposeResult> sample_variants(const std::vector<Element>& elements,
                                           const Canvas& canvas, const LayerPlan& plan,
                                           Backend& backend, const FontStore& store,
                                           const FontVocabulary& vocab, int n,
                                           const ComposeOptions& opts = {});

/// Adds new elements to a finished design: roles are planned for the new
/// elements, plans merge (new members append after existing ones), and only
/// layers containing new members are queried; every existing attribute
/// record is returned unchanged.
ComposeResult fill_elements(const Design& base, const std::vector<Element>& new_elements,
                            Backend& backend, const FontStore& store,
                            const FontVocabulary& vocab, const ComposeOptions& opts = {});

/// One independent composition per canvas size.
std::vector<ComposeResult> resize_compose(const std::vector<Element>& elements,
                                          const LayerPlan& plan, Backend& backend,
                                          const FontStore& store, const FontVocabulary& vocab,
                                          const std::vector<Canvas>& canvases,
                                          const ComposeOptions& opts = {});

} // namespace dcomp
