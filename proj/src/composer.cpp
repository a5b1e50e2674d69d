// composer.cpp
// SPDX-License-Identifier: Apache-2.0
#include "dcomp/composer.hpp"

#include <algorithm>
#include <chrono>
#include <set>

#include "dcomp/kernels.hpp"
#include "dcomp/planner.hpp"

namespace dcomp {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string repair_instruction(const LayerInput& input) {
    std::string keys = "index, left, top, width, height";
    const bool has_text =
        std::any_of(input.items.begin(), input.items.end(),
                    [](const LayerItem& it) { return !it.is_image; });
    if (has_text)
        keys += ", angle, font, font_size, color, text_align, capitalize, letter_spacing, "
                "line_height";
    return "The previous response could not be parsed. Answer again with one JSON object per "
           "announced element, using exactly the keys " + keys + ".";
}

/// Queries the backend for one layer, retrying with a corrective
/// instruction on parse failures. On success the accepted text is written
/// into the last turn's assistant slot.
LayerOutput query_layer(Conversation& conv, const LayerInput& input, Backend& backend,
                        const FontVocabulary& vocab, const ComposeOptions& opts,
                        LayerTrace& trace, int layer_number, int& backend_calls) {
    for (int attempt = 0;; ++attempt) {
        const auto t0 = std::chrono::steady_clock::now();
        std::string text = backend.respond(conv);
        trace.respond_seconds += seconds_since(t0);
        ++backend_calls;
        try {
            LayerOutput out = parse_layer_output(text, input, vocab);
            conv.turns.back().assistant = std::move(text);
            return out;
        } catch (const CodecError& err) {
            if (attempt >= opts.max_parse_retries) throw LayerFailed(layer_number, err.what());
            ++trace.retries;
            conv.turns.back().assistant = std::move(text);
            Turn corrective;
            corrective.human = repair_instruction(input);
            conv.turns.push_back(std::move(corrective));
        }
    }
}

void apply_records(Design& design, const LayerOutput& out) {
    for (const ElementAttributes& rec : out.records) design.attributes[rec.element_id] = rec;
}

std::vector<std::shared_ptr<const Raster>> item_rasters(const Design& design,
                                                        const LayerInput& input) {
    std::vector<std::shared_ptr<const Raster>> out;
    for (const LayerItem& item : input.items) {
        const Element* e = design.find_element(item.element_id);
        out.push_back(e ? e->image_content : nullptr);
    }
    return out;
}

} // namespace

std::string ReplayBackend::respond(const Conversation& so_far) {
    std::size_t answered = 0;
    for (const Turn& t : so_far.turns)
        if (!t.assistant.empty()) ++answered;
    if (answered >= turns_.size())
        throw BackendError("replay transcript exhausted after " +
                           std::to_string(turns_.size()) + " turns");
    return turns_[answered];
}

ComposeResult compose(const std::vector<Element>& elements, const Canvas& canvas,
                      const LayerPlan& plan, Backend& backend, const FontStore& store,
                      const FontVocabulary& vocab, const ComposeOptions& opts) {
    ComposeResult result;
    Design& design = result.design;
    design.canvas = canvas;
    design.elements = elements;
    design.plan = plan;

    CompositionTrace& trace = result.trace;
    trace.conversation.canvas = canvas;
    trace.states[0] = blank_canvas(canvas);

    const auto inputs = build_layer_inputs(elements, plan);
    for (int i = 1; i <= 5; ++i) {
        const LayerInput& input = inputs[i - 1];
        LayerTrace lt;
        lt.layer = i;

        std::shared_ptr<const Raster> prev_image;
        if (i > 1) prev_image = std::make_shared<const Raster>(trace.states[i - 1]);
        Turn turn = build_turn(i, input, prev_image, i - 1, canvas,
                               item_rasters(design, input));
        trace.conversation.turns.push_back(std::move(turn));

        LayerOutput out = query_layer(trace.conversation, input, backend, vocab, opts, lt, i,
                                      trace.backend_calls);
        apply_records(design, out);

        const auto t0 = std::chrono::steady_clock::now();
        trace.states[i] = trace.states[i - 1];
        composite_layer(trace.states[i], design, kLayerOrder[i - 1], store, opts.render);
        lt.render_seconds = seconds_since(t0);
        trace.layers.push_back(lt);
    }
    return result;
}

ComposeResult compose_partial(const Design& given, int given_layers, Backend& backend,
                              const FontStore& store, const FontVocabulary& vocab,
                              const ComposeOptions& opts) {
    if (given_layers < 0 || given_layers > 5)
        throw std::invalid_argument("compose_partial: given layer count out of range");
    // The prefix must be fully attributed and the suffix untouched.
    for (SemanticRole role : kLayerOrder) {
        for (const std::string& id : given.plan.layer(role)) {
            const bool has = given.attributes.count(id) != 0;
            if (role_index(role) <= given_layers && !has)
                throw std::invalid_argument("InvalidPrefix: element " + id +
                                            " in a given layer has no attributes");
            if (role_index(role) > given_layers && has)
                throw std::invalid_argument("InvalidPrefix: element " + id +
                                            " beyond the given layers is already attributed");
        }
    }

    ComposeResult result;
    Design& design = result.design;
    design = given;

    CompositionTrace& trace = result.trace;
    trace.conversation.canvas = given.canvas;
    trace.states[0] = blank_canvas(given.canvas);

    const auto inputs = build_layer_inputs(given.elements, given.plan);
    for (int i = 1; i <= 5; ++i) {
        const LayerInput& input = inputs[i - 1];
        LayerTrace lt;
        lt.layer = i;

        std::shared_ptr<const Raster> prev_image;
        if (i > 1) prev_image = std::make_shared<const Raster>(trace.states[i - 1]);
        Turn turn = build_turn(i, input, prev_image, i - 1, given.canvas,
                               item_rasters(design, input));
        trace.conversation.turns.push_back(std::move(turn));

        if (i <= given_layers) {
            lt.given = true;
            LayerOutput out;
            out.role = input.role;
            for (const LayerItem& item : input.items) {
                ElementAttributes rec = given.attributes.at(item.element_id);
                rec.index = item.index;
                out.records.push_back(std::move(rec));
            }
            trace.conversation.turns.back().assistant = serialize_layer_output(out);
        } else {
            LayerOutput out = query_layer(trace.conversation, input, backend, vocab, opts, lt,
                                          i, trace.backend_calls);
            apply_records(design, out);
        }

        const auto t0 = std::chrono::steady_clock::now();
        trace.states[i] = trace.states[i - 1];
        composite_layer(trace.states[i], design, kLayerOrder[i - 1], store, opts.render);
        lt.render_seconds = seconds_since(t0);
        trace.layers.push_back(lt);
    }
    return result;
}

std::vector<ComposeResult> sample_variants(const std::vector<Element>& elements,
                                           const Canvas& canvas, const LayerPlan& plan,
                                           Backend& backend, const FontStore& store,
                                           const FontVocabulary& vocab, int n,
                                           const ComposeOptions& opts) {
    if (n < 1) throw std::invalid_argument("sample_variants: n must be >= 1");
    std::vector<ComposeResult> out;
    if (n == 1) {
        out.push_back(compose(elements, canvas, plan, backend, store, vocab, opts));
        return out;
    }
    const auto caps = backend.capabilities();
    for (int v = 0; v < n; ++v) {
        auto seeded = backend.with_seed(opts.seed + static_cast<std::uint64_t>(v));
        if (!seeded && caps.deterministic)
            throw BackendError("backend is deterministic and cannot sample variants");
        Backend& b = seeded ? *seeded : backend;
        ComposeOptions vo = opts;
        vo.seed = opts.seed + static_cast<std::uint64_t>(v);
        out.push_back(compose(elements, canvas, plan, b, store, vocab, vo));
    }
    return out;
}

ComposeResult fill_elements(const Design& base, const std::vector<Element>& new_elements,
                            Backend& backend, const FontStore& store,
                            const FontVocabulary& vocab, const ComposeOptions& opts) {
    for (const Element& e : new_elements)
        if (base.find_element(e.id))
            throw std::invalid_argument("fill_elements: element id " + e.id +
                                        " already exists in the base design");
    ComposeResult result;
    if (new_elements.empty()) {
        result.design = base;
        result.trace.conversation.canvas = base.canvas;
        result.trace.states[0] = blank_canvas(base.canvas);
        for (int i = 1; i <= 5; ++i) result.trace.states[i] = result.trace.states[0];
        return result;
    }

    // Roles for the new elements; respect the single-background rule against
    // the base design.
    LayerPlan new_plan = plan_layers(new_elements, base.canvas, PlannerMode::Heuristic);
    const bool base_has_background = !base.plan.layer(SemanticRole::Background).empty();
    Design& design = result.design;
    design = base;
    for (const Element& e : new_elements) {
        SemanticRole role = *new_plan.role_of(e.id);
        if (role == SemanticRole::Background && base_has_background)
            role = SemanticRole::LogoImage;
        design.elements.push_back(e);
        design.plan.assign(e.id, role);
    }

    // New records continue the index sequence after every existing index.
    int next_index = -1;
    for (const auto& [id, rec] : base.attributes) next_index = std::max(next_index, rec.index);
    ++next_index;

    CompositionTrace& trace = result.trace;
    trace.conversation.canvas = base.canvas;
    trace.states[0] = blank_canvas(base.canvas);

    std::set<std::string> new_ids;
    for (const Element& e : new_elements) new_ids.insert(e.id);

    for (int i = 1; i <= 5; ++i) {
        const SemanticRole role = kLayerOrder[i - 1];
        LayerTrace lt;
        lt.layer = i;

        LayerInput existing_input, new_input;
        existing_input.role = new_input.role = role;
        for (const std::string& id : design.plan.layer(role)) {
            const Element* e = design.find_element(id);
            LayerItem item;
            item.element_id = id;
            item.is_image = e->modality == Modality::Image;
            item.text = e->text_content;
            if (new_ids.count(id)) {
                item.index = next_index++;
                new_input.items.push_back(std::move(item));
            } else {
                item.index = base.attributes.at(id).index;
                existing_input.items.push_back(std::move(item));
            }
        }

        // Context turn: the layer's existing members with their records.
        // Skipped when the layer consists purely of new members, so the
        // transcript stays compact.
        const bool emit_context = !existing_input.items.empty() || new_input.items.empty();
        if (emit_context) {
            std::shared_ptr<const Raster> prev_image;
            if (i > 1) prev_image = std::make_shared<const Raster>(trace.states[i - 1]);
            Turn turn = build_turn(i, existing_input, prev_image, i - 1, base.canvas,
                                   item_rasters(design, existing_input));
            LayerOutput out;
            out.role = role;
            for (const LayerItem& item : existing_input.items)
                out.records.push_back(base.attributes.at(item.element_id));
            turn.assistant = serialize_layer_output(out);
            trace.conversation.turns.push_back(std::move(turn));
        }

        // Bake the existing members before asking for the new ones, so the
        // query sees them in the canvas state.
        Raster current = trace.states[i - 1];
        for (const LayerItem& item : existing_input.items)
            composite_element(current, *design.find_element(item.element_id),
                              base.attributes.at(item.element_id), store, opts.render);

        if (!new_input.items.empty()) {
            lt.given = false;
            Turn query;
            if (!emit_context && i == 1) {
                query = build_turn(1, new_input, nullptr, 0, base.canvas,
                                   item_rasters(design, new_input));
            } else {
                query.human =
                    "current canvas state: <image>. " + serialize_layer_input(new_input);
                query.images.push_back({"state:" + std::to_string(i - 1),
                                        std::make_shared<const Raster>(current)});
                for (const LayerItem& item : new_input.items) {
                    if (!item.is_image) continue;
                    const Element* e = design.find_element(item.element_id);
                    query.images.push_back(
                        {"element:" + item.element_id, e ? e->image_content : nullptr});
                }
            }
            trace.conversation.turns.push_back(std::move(query));
            LayerOutput out = query_layer(trace.conversation, new_input, backend, vocab, opts,
                                          lt, i, trace.backend_calls);
            apply_records(design, out);
            for (const ElementAttributes& rec : out.records)
                composite_element(current, *design.find_element(rec.element_id), rec, store,
                                  opts.render);
        } else {
            lt.given = true;
        }

        trace.states[i] = std::move(current);
        trace.layers.push_back(lt);
    }
    return result;
}

std::vector<ComposeResult> resize_compose(const std::vector<Element>& elements,
                                          const LayerPlan& plan, Backend& backend,
                                          const FontStore& store, const FontVocabulary& vocab,
                                          const std::vector<Canvas>& canvases,
                                          const ComposeOptions& opts) {
    if (canvases.empty()) throw std::invalid_argument("resize_compose: no canvases given");
    std::vector<ComposeResult> out;
    for (const Canvas& canvas : canvases)
        out.push_back(compose(elements, canvas, plan, backend, store, vocab, opts));
    return out;
}

} // namespace dcomp
