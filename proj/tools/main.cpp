// main.cpp
// SPDX-License-Identifier: Apache-2.0
//
// dcomp: plan element roles, compose layered designs against a backend,
// export training conversations, render, and score.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dcomp/composer.hpp"
#include "dcomp/dataset.hpp"
#include "dcomp/heuristic_backend.hpp"
#include "dcomp/metrics.hpp"
#include "dcomp/parallel.hpp"
#include "dcomp/planner.hpp"
#include "dcomp/png_io.hpp"
#include "dcomp/remote_backend.hpp"
#include "dcomp/renderer.hpp"

namespace fs = std::filesystem;
using namespace dcomp;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

struct CommonOpts {
    std::string out = "out";
    std::string assets_root;
    std::uint64_t seed = 0;
    int jobs = 0;
    std::string fonts_dir = "fonts";
    std::string fallback_font;
    std::string font_vocab;
    std::string backend = "heuristic";
    std::string transcript;
    double temperature = 0.7;
    double top_p = 0.95;
    int retries = 2;
    std::string endpoint = "http://127.0.0.1:8080";
    std::string model = "default";
    std::string api_key_env = "OPENAI_API_KEY";
    bool no_antialias = false;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--out", o.out, "Output directory");
    cmd->add_option("--seed", o.seed, "Random seed (sampling, shuffling, jitter)");
    cmd->add_option("--jobs", o.jobs,
                    "Worker threads for batch work and kernels; 1 forces the serial path");
    cmd->add_option("--fonts", o.fonts_dir, "Fonts directory (<family>.ttf files)")
        ->envname("DCOMP_FONTS");
    cmd->add_option("--fallback-font", o.fallback_font,
                    "Fallback face (default <fonts>/fallback.ttf)");
    cmd->add_option("--font-vocab", o.font_vocab, "Font vocabulary file (one family per line)");
    cmd->add_option("--assets", o.assets_root, "Asset root for relative image paths");
}

void add_backend_opts(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--backend", o.backend, "Backend: replay, heuristic or remote")
        ->check(CLI::IsMember({"replay", "heuristic", "remote"}));
    cmd->add_option("--transcript", o.transcript, "Replay transcript (JSONL export record)");
    cmd->add_option("--temperature", o.temperature, "Sampling temperature (remote)");
    cmd->add_option("--top-p", o.top_p, "Nucleus sampling top-p (remote)");
    cmd->add_option("--retries", o.retries, "Parse-repair retries per layer");
    cmd->add_option("--endpoint", o.endpoint, "Chat-completions base URL")
        ->envname("DCOMP_ENDPOINT");
    cmd->add_option("--model", o.model, "Remote model name")->envname("DCOMP_MODEL");
    cmd->add_option("--api-key-env", o.api_key_env,
                    "Environment variable holding the API key");
    cmd->add_flag("--no-antialias", o.no_antialias, "Disable glyph antialiasing");
}

void setup_parallel(const CommonOpts& o) {
    if (o.jobs == 1) par::set_mode(par::Mode::Serial);
    if (o.jobs > 1) par::set_thread_count(o.jobs);
}

FontStore make_store(const CommonOpts& o) {
    const std::string fallback =
        o.fallback_font.empty() ? o.fonts_dir + "/fallback.ttf" : o.fallback_font;
    return FontStore(o.fonts_dir, fallback, [](const std::string& family) {
        std::cerr << "note: font family \"" << family << "\" missing, using fallback\n";
    });
}

FontVocabulary make_vocab(const CommonOpts& o, const std::vector<std::string>& extra = {}) {
    FontVocabulary vocab;
    if (!o.font_vocab.empty()) {
        vocab = FontVocabulary::load_file(o.font_vocab);
    } else if (fs::exists(o.fonts_dir)) {
        for (const auto& entry : fs::directory_iterator(o.fonts_dir))
            if (entry.path().extension() == ".ttf" && entry.path().stem() != "fallback")
                vocab.add(entry.path().stem().string());
    }
    for (const std::string& f : extra) vocab.add(f);
    return vocab;
}

std::vector<std::string> transcript_turns(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open transcript: " + path);
    std::string line;
    if (!std::getline(f, line) || line.empty())
        throw std::runtime_error("empty transcript: " + path);
    const json record = json::parse(line);
    std::vector<std::string> turns;
    for (const auto& t : record.at("turns")) turns.push_back(t.at("assistant").get<std::string>());
    return turns;
}

std::unique_ptr<Backend> make_backend(const CommonOpts& o, const std::vector<Element>& roster,
                                      const LayerPlan& plan, const FontStore& store,
                                      const FontVocabulary& vocab) {
    if (o.backend == "replay") {
        if (o.transcript.empty())
            throw std::runtime_error("--backend replay requires --transcript");
        return std::make_unique<ReplayBackend>(transcript_turns(o.transcript));
    }
    if (o.backend == "heuristic")
        return std::make_unique<HeuristicComposer>(roster, plan, &store, vocab, o.seed,
                                                   o.seed != 0);
    RemoteConfig cfg;
    cfg.base_url = o.endpoint;
    cfg.model = o.model;
    cfg.api_key_env = o.api_key_env;
    cfg.temperature = o.temperature;
    cfg.top_p = o.top_p;
    return std::make_unique<RemoteChatBackend>(cfg);
}

LayerPlan plan_from_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open plan: " + path);
    json j;
    f >> j;
    LayerPlan plan;
    // Accept either {"roles": {id: role}} or the full plan.json we write.
    const json& roles = j.contains("roles") ? j["roles"] : j;
    // Rebuild ordering from the "layers" lists when present to keep order.
    if (j.contains("layers")) {
        for (SemanticRole role : kLayerOrder) {
            const std::string name(role_name(role));
            if (!j["layers"].contains(name)) continue;
            for (const auto& id : j["layers"][name]) plan.assign(id.get<std::string>(), role);
        }
        return plan;
    }
    for (auto it = roles.begin(); it != roles.end(); ++it) {
        const auto role = role_from_name(it.value().get<std::string>());
        if (!role) throw std::runtime_error("unknown role in plan: " + it.value().dump());
        plan.assign(it.key(), *role);
    }
    return plan;
}

ordered_json trace_to_json(const CompositionTrace& trace) {
    ordered_json j;
    j["backend_calls"] = trace.backend_calls;
    j["layers"] = ordered_json::array();
    for (const LayerTrace& lt : trace.layers)
        j["layers"].push_back({{"layer", lt.layer},
                               {"given", lt.given},
                               {"retries", lt.retries},
                               {"respond_seconds", lt.respond_seconds},
                               {"render_seconds", lt.render_seconds}});
    j["turns"] = ordered_json::array();
    for (const Turn& t : trace.conversation.turns) {
        ordered_json labels = ordered_json::array();
        for (const ImageSlot& s : t.images) labels.push_back(s.label);
        j["turns"].push_back(
            {{"human", t.human}, {"assistant", t.assistant}, {"images", labels}});
    }
    return j;
}

void write_result(const fs::path& dir, const ComposeResult& result) {
    fs::create_directories(dir / "assets");
    std::map<std::string, std::string> asset_paths;
    for (const Element& e : result.design.elements) {
        if (e.modality != Modality::Image || !e.image_content) continue;
        const std::string rel = "assets/" + e.id + ".png";
        png::write_file((dir / rel).string(), *e.image_content);
        asset_paths[e.id] = rel;
    }
    save_design((dir / "design.json").string(), result.design, asset_paths);
    for (int i = 0; i <= 5; ++i)
        png::write_file((dir / ("G" + std::to_string(i) + ".png")).string(),
                        result.trace.states[i]);
    std::ofstream trace(dir / "trace.json", std::ios::trunc);
    trace << trace_to_json(result.trace).dump(2) << "\n";
}

Design manifest_to_design(const ElementManifest& m) {
    Design d;
    d.id = m.id;
    d.canvas = m.canvas;
    d.elements = m.elements;
    if (m.plan) d.plan = *m.plan;
    d.attributes = m.attributes;
    return d;
}

// ---- commands ----

int cmd_plan(const CommonOpts& o, const std::string& elements_path, const std::string& mode) {
    setup_parallel(o);
    const ElementManifest manifest = load_element_manifest(elements_path, o.assets_root);

    PlannerMode planner_mode = PlannerMode::Heuristic;
    if (mode == "remote") planner_mode = PlannerMode::Remote;
    else if (mode == "remote-fallback") planner_mode = PlannerMode::RemoteWithFallback;

    RemoteLabelFn labeler;
    if (planner_mode != PlannerMode::Heuristic) {
        RemoteConfig cfg;
        cfg.base_url = o.endpoint;
        cfg.model = o.model;
        cfg.api_key_env = o.api_key_env;
        cfg.temperature = o.temperature;
        cfg.top_p = o.top_p;
        labeler = make_remote_labeler(std::make_shared<RemoteChatBackend>(cfg));
    }

    const PlanResult result =
        plan_layers_detailed(manifest.elements, manifest.canvas, planner_mode, labeler);

    ordered_json j;
    j["id"] = manifest.id;
    ordered_json roles, layers, rationale;
    for (const auto& [id, role] : result.plan.assignment)
        roles[id] = std::string(role_name(role));
    for (SemanticRole role : kLayerOrder) {
        ordered_json ids = ordered_json::array();
        for (const std::string& id : result.plan.layer(role)) ids.push_back(id);
        layers[std::string(role_name(role))] = std::move(ids);
    }
    for (const auto& [id, why] : result.rationale) rationale[id] = why;
    j["roles"] = std::move(roles);
    j["layers"] = std::move(layers);
    j["rationale"] = std::move(rationale);

    fs::create_directories(o.out);
    std::ofstream f(fs::path(o.out) / "plan.json", std::ios::trunc);
    f << j.dump(2) << "\n";
    std::cout << "plan written to " << (fs::path(o.out) / "plan.json") << "\n";
    return 0;
}

int cmd_compose(const CommonOpts& o, const std::string& elements_path,
                const std::string& plan_path, int given_layers, int variants,
                const std::vector<std::string>& canvas_specs, const std::string& fill_base) {
    setup_parallel(o);
    const FontStore store = make_store(o);
    const ElementManifest manifest = load_element_manifest(elements_path, o.assets_root);

    std::vector<std::string> manifest_fonts;
    for (const auto& [id, rec] : manifest.attributes)
        if (rec.text) manifest_fonts.push_back(rec.text->font);
    const FontVocabulary vocab = make_vocab(o, manifest_fonts);

    ComposeOptions opts;
    opts.temperature = o.temperature;
    opts.top_p = o.top_p;
    opts.max_parse_retries = o.retries;
    opts.seed = o.seed;
    opts.render.antialias = !o.no_antialias;

    fs::create_directories(o.out);

    if (!fill_base.empty()) {
        const ElementManifest base_manifest = load_element_manifest(fill_base, o.assets_root);
        if (!base_manifest.plan)
            throw std::runtime_error("--fill base design must carry roles");
        const Design base = manifest_to_design(base_manifest);
        // Roster for the heuristic backend: base plus the new elements in
        // their heuristically planned layers.
        Design merged_preview = base;
        const LayerPlan new_plan =
            plan_layers(manifest.elements, base.canvas, PlannerMode::Heuristic);
        for (const Element& e : manifest.elements) {
            merged_preview.elements.push_back(e);
            merged_preview.plan.assign(e.id, *new_plan.role_of(e.id));
        }
        auto backend =
            make_backend(o, merged_preview.elements, merged_preview.plan, store, vocab);
        const auto result = fill_elements(base, manifest.elements, *backend, store, vocab, opts);
        write_result(o.out, result);
        std::cout << "filled design written to " << o.out << "\n";
        return 0;
    }

    LayerPlan plan;
    if (!plan_path.empty()) plan = plan_from_file(plan_path);
    else if (manifest.plan) plan = *manifest.plan;
    else plan = plan_layers(manifest.elements, manifest.canvas, PlannerMode::Heuristic);

    auto backend = make_backend(o, manifest.elements, plan, store, vocab);

    if (!canvas_specs.empty()) {
        std::vector<Canvas> canvases;
        for (const std::string& spec : canvas_specs) {
            const auto x = spec.find('x');
            if (x == std::string::npos)
                throw std::runtime_error("bad --canvas value (want WxH): " + spec);
            canvases.push_back(Canvas{std::stoi(spec.substr(0, x)),
                                      std::stoi(spec.substr(x + 1))});
        }
        const auto results =
            resize_compose(manifest.elements, plan, *backend, store, vocab, canvases, opts);
        for (std::size_t i = 0; i < results.size(); ++i) {
            const fs::path dir = fs::path(o.out) / ("canvas_" + canvas_specs[i]);
            write_result(dir, results[i]);
        }
        std::cout << results.size() << " designs written under " << o.out << "\n";
        return 0;
    }

    if (variants > 1) {
        const auto results = sample_variants(manifest.elements, manifest.canvas, plan,
                                             *backend, store, vocab, variants, opts);
        for (std::size_t i = 0; i < results.size(); ++i)
            write_result(fs::path(o.out) / ("variant_" + std::to_string(i)), results[i]);
        std::cout << results.size() << " variants written under " << o.out << "\n";
        return 0;
    }

    if (given_layers > 0) {
        Design given = manifest_to_design(manifest);
        given.plan = plan;
        // Drop any attribute records beyond the conditioning prefix.
        std::vector<std::string> beyond;
        for (const auto& [id, rec] : given.attributes)
            if (role_index(*given.plan.role_of(id)) > given_layers) beyond.push_back(id);
        for (const std::string& id : beyond) given.attributes.erase(id);
        const auto result = compose_partial(given, given_layers, *backend, store, vocab, opts);
        write_result(o.out, result);
        std::cout << "design written to " << o.out << "\n";
        return 0;
    }

    const auto result =
        compose(manifest.elements, manifest.canvas, plan, *backend, store, vocab, opts);
    write_result(o.out, result);
    std::cout << "design written to " << o.out << "\n";
    return 0;
}

int cmd_export(const CommonOpts& o, const std::string& corpus, const std::string& split,
               bool no_shuffle, int max_elements, const std::string& cache_dir_opt) {
    setup_parallel(o);
    const FontStore store = make_store(o);
    auto [designs, manifest] = load_corpus(corpus, split);
    if (designs.empty()) throw std::runtime_error("corpus is empty: " + corpus);

    auto [kept, dropped] = filter_by_element_count(designs, max_elements);
    for (const Design& d : dropped)
        manifest.filter_report.push_back(
            {d.id, "more than " + std::to_string(max_elements) + " elements"});

    fs::create_directories(o.out);
    const std::string cache_dir =
        cache_dir_opt.empty() ? (fs::path(o.out) / "state_cache").string() : cache_dir_opt;
    RenderOptions render_opts;
    render_opts.antialias = !o.no_antialias;
    const CacheIndex cache = cache_states(kept, store, cache_dir, render_opts);

    std::ofstream out(fs::path(o.out) / "conversations.jsonl", std::ios::trunc);
    for (const Design& d : kept) {
        const auto& entries = cache.designs.at(d.id);
        std::array<std::shared_ptr<const Raster>, 4> states;
        for (int i = 1; i <= 4; ++i)
            states[i - 1] =
                std::make_shared<const Raster>(png::read_file(entries[i - 1].file));
        const std::optional<std::uint64_t> seed =
            no_shuffle ? std::nullopt : std::optional<std::uint64_t>(o.seed);
        const Conversation conv = export_training_conversation(d, seed, states);

        ordered_json record;
        record["design_id"] = d.id;
        if (seed) record["seed"] = *seed;
        else record["seed"] = nullptr;
        record["canvas"] = {{"width", d.canvas.width}, {"height", d.canvas.height}};
        record["turns"] = ordered_json::array();
        ordered_json images = ordered_json::array();
        for (const Turn& t : conv.turns) {
            record["turns"].push_back({{"human", t.human}, {"assistant", t.assistant}});
            for (const ImageSlot& slot : t.images) {
                if (slot.label.rfind("state:", 0) == 0) {
                    const int level = std::stoi(slot.label.substr(6));
                    images.push_back(entries[level - 1].file);
                } else if (slot.label.rfind("element:", 0) == 0) {
                    const std::string id = slot.label.substr(8);
                    const auto& paths = manifest.asset_paths[d.id];
                    auto it = paths.find(id);
                    images.push_back(it != paths.end()
                                         ? (fs::path(corpus) / it->second).string()
                                         : slot.label);
                }
            }
        }
        record["images"] = std::move(images);
        out << record.dump() << "\n";
    }

    ordered_json mj;
    mj["split"] = manifest.split;
    mj["designs_exported"] = static_cast<int>(kept.size());
    mj["designs_dropped"] = static_cast<int>(dropped.size());
    ordered_json hist;
    for (const auto& [count, n] : manifest.element_count_histogram)
        hist[std::to_string(count)] = n;
    mj["element_count_histogram"] = std::move(hist);
    mj["font_vocabulary"] = manifest.font_vocabulary;
    ordered_json filt = ordered_json::array();
    for (const auto& [id, why] : manifest.filter_report)
        filt.push_back({{"id", id}, {"reason", why}});
    mj["filtered"] = std::move(filt);
    mj["cache"] = {{"renders", cache.renders_performed}, {"hits", cache.cache_hits}};
    std::ofstream mf(fs::path(o.out) / "manifest.json", std::ios::trunc);
    mf << mj.dump(2) << "\n";

    std::cout << kept.size() << " conversations written to "
              << (fs::path(o.out) / "conversations.jsonl") << "\n";
    return 0;
}

int cmd_eval(const CommonOpts& o, const std::string& designs_root, const std::string& split,
             const std::string& saliency_dir, int max_elements) {
    setup_parallel(o);
    const FontStore store = make_store(o);
    auto [designs, manifest] = load_corpus(designs_root, split);
    if (designs.empty()) throw std::runtime_error("no designs found under " + designs_root);
    if (max_elements > 0) {
        auto [kept, dropped] = filter_by_element_count(designs, max_elements);
        designs = std::move(kept);
    }

    RenderOptions render_opts;
    render_opts.antialias = !o.no_antialias;
    SaliencyProvider saliency = [&](const Design& d) -> SaliencyMap {
        if (!saliency_dir.empty()) {
            const fs::path p = fs::path(saliency_dir) / (d.id + ".png");
            if (fs::exists(p))
                return load_saliency_map(p.string(), d.canvas.width, d.canvas.height);
        }
        return compute_saliency(render_state(d, 1, store, render_opts).image);
    };
    BackgroundProvider background = [&](const Design& d) {
        return render_state(d, 3, store, render_opts).image;
    };

    const ScoreReport report = evaluate_corpus(designs, saliency, background);
    std::cout << report.to_table();

    fs::create_directories(o.out);
    std::ofstream jf(fs::path(o.out) / "report.json", std::ios::trunc);
    jf << report.to_json() << "\n";
    std::ofstream cf(fs::path(o.out) / "report.csv", std::ios::trunc);
    cf << report.to_csv();
    std::cout << "report written to " << (fs::path(o.out) / "report.json") << "\n";
    return 0;
}

int cmd_render(const CommonOpts& o, const std::string& design_path, int upto) {
    setup_parallel(o);
    const FontStore store = make_store(o);
    const ElementManifest manifest = load_element_manifest(design_path, o.assets_root);
    if (!manifest.plan) throw std::runtime_error("design has no roles; run `dcomp plan` first");
    const Design d = manifest_to_design(manifest);
    RenderOptions opts;
    opts.antialias = !o.no_antialias;
    fs::create_directories(o.out);
    for (int level = 0; level <= upto; ++level) {
        const CanvasState state = render_state(d, level, store, opts);
        png::write_file((fs::path(o.out) / ("G" + std::to_string(level) + ".png")).string(),
                        state.image);
    }
    std::cout << "states G0..G" << upto << " written to " << o.out << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"layered graphic design composition toolkit"};
    app.require_subcommand(1);
    app.set_config("--config");

    CommonOpts o;

    // plan
    std::string elements_path, planner_mode = "heuristic";
    CLI::App* plan = app.add_subcommand("plan", "Assign semantic layers to input elements");
    plan->add_option("--elements", elements_path, "Element manifest JSON")->required();
    plan->add_option("--mode", planner_mode, "heuristic, remote or remote-fallback")
        ->check(CLI::IsMember({"heuristic", "remote", "remote-fallback"}));
    add_common(plan, o);
    add_backend_opts(plan, o);

    // compose
    std::string compose_elements, compose_plan, fill_base;
    int given_layers = 0, variants = 1;
    std::vector<std::string> canvas_specs;
    CLI::App* compose_cmd =
        app.add_subcommand("compose", "Compose a layered design with a backend");
    compose_cmd->add_option("--elements", compose_elements, "Element manifest JSON")->required();
    compose_cmd->add_option("--plan", compose_plan, "Layer plan JSON (from `dcomp plan`)");
    auto* opt_given = compose_cmd->add_option(
        "--given-layers", given_layers,
        "Treat layers 1..k of the manifest as fixed (1=layout, 3=typography)");
    auto* opt_variants = compose_cmd->add_option("--variants", variants,
                                                 "Sample N design variants");
    auto* opt_canvas = compose_cmd->add_option("--canvas", canvas_specs,
                                               "Compose for canvas size WxH (repeatable)");
    auto* opt_fill = compose_cmd->add_option(
        "--fill", fill_base, "Add the manifest's elements to this finished design");
    opt_fill->excludes(opt_given)->excludes(opt_variants)->excludes(opt_canvas);
    opt_canvas->excludes(opt_given)->excludes(opt_variants);
    opt_variants->excludes(opt_given);
    add_common(compose_cmd, o);
    add_backend_opts(compose_cmd, o);

    // export
    std::string corpus_root, split, cache_dir;
    bool no_shuffle = false;
    int max_elements = 25;
    CLI::App* export_cmd =
        app.add_subcommand("export", "Export training conversations from a corpus");
    export_cmd->add_option("--corpus", corpus_root, "Corpus root directory")->required();
    export_cmd->add_option("--split", split, "Split name (splits/<name>.txt)");
    export_cmd->add_flag("--no-shuffle", no_shuffle, "Keep the stored within-layer order");
    export_cmd->add_option("--max-elements", max_elements,
                           "Drop designs with more elements (0 disables)");
    export_cmd->add_option("--cache", cache_dir, "Canvas-state cache directory");
    add_common(export_cmd, o);
    add_backend_opts(export_cmd, o);

    // eval
    std::string eval_root, eval_split, saliency_dir;
    int eval_max_elements = 0;
    CLI::App* eval_cmd = app.add_subcommand("eval", "Score a corpus of finished designs");
    eval_cmd->add_option("--designs", eval_root, "Corpus root directory")->required();
    eval_cmd->add_option("--split", eval_split, "Split name");
    eval_cmd->add_option("--saliency", saliency_dir,
                         "Directory of <design_id>.png saliency maps (overrides the fallback)");
    eval_cmd->add_option("--max-elements", eval_max_elements,
                         "Drop designs with more elements (0 disables)");
    add_common(eval_cmd, o);
    add_backend_opts(eval_cmd, o);

    // render
    std::string render_design;
    int upto = 5;
    CLI::App* render_cmd = app.add_subcommand("render", "Render canvas states of a design");
    render_cmd->add_option("--design", render_design, "Fully attributed design JSON")
        ->required();
    render_cmd->add_option("--upto", upto, "Highest state to render (0..5)")
        ->check(CLI::Range(0, 5));
    add_common(render_cmd, o);
    add_backend_opts(render_cmd, o);

    CLI11_PARSE(app, argc, argv);

    try {
        if (plan->parsed()) return cmd_plan(o, elements_path, planner_mode);
        if (compose_cmd->parsed())
            return cmd_compose(o, compose_elements, compose_plan, given_layers, variants,
                               canvas_specs, fill_base);
        if (export_cmd->parsed())
            return cmd_export(o, corpus_root, split, no_shuffle, max_elements, cache_dir);
        if (eval_cmd->parsed())
            return cmd_eval(o, eval_root, eval_split, saliency_dir, eval_max_elements);
        if (render_cmd->parsed()) return cmd_render(o, render_design, upto);
    } catch (const LayerFailed& e) {
        std::cerr << "composition failed at layer " << e.layer << ": " << e.what() << "\n";
        return 3;
    } catch (const BackendError& e) {
        std::cerr << "backend error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
