// dataset.cpp
// SPDX-License-Identifier: Apache-2.0
#include "dcomp/dataset.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <set>

#include <json.hpp>

#include "dcomp/kernels.hpp"
#include "dcomp/parallel.hpp"
#include "dcomp/png_io.hpp"
#include "dcomp/saliency.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace dcomp {

namespace {

[[noreturn]] void schema_error(const std::string& id, const std::string& field) {
    throw DatasetError("SchemaError(" + id + ", " + field + ")");
}

int require_int_field(const json& j, const char* key, const std::string& id) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_number()) schema_error(id, key);
    return it->get<int>();
}

Rgb color_from_json(const json& j, const std::string& id, const char* field) {
    if (!j.is_array() || j.size() != 3) schema_error(id, field);
    auto chan = [&](int k) {
        if (!j[k].is_number()) schema_error(id, field);
        return static_cast<std::uint8_t>(std::clamp(j[k].get<int>(), 0, 255));
    };
    return Rgb{chan(0), chan(1), chan(2)};
}

ElementAttributes attrs_from_json(const json& j, const std::string& id, bool is_text) {
    ElementAttributes rec;
    rec.element_id = id;
    rec.index = require_int_field(j, "index", id);
    rec.bbox.left = require_int_field(j, "left", id);
    rec.bbox.top = require_int_field(j, "top", id);
    rec.bbox.width = require_int_field(j, "width", id);
    rec.bbox.height = require_int_field(j, "height", id);
    if (is_text) {
        TextAttributes t;
        auto num = [&](const char* key) {
            auto it = j.find(key);
            if (it == j.end() || !it->is_number()) schema_error(id, key);
            return it->get<double>();
        };
        t.angle = num("angle");
        if (!j.contains("font") || !j["font"].is_string()) schema_error(id, "font");
        t.font = j["font"].get<std::string>();
        t.font_size = require_int_field(j, "font_size", id);
        t.color = color_from_json(j.value("color", json::array()), id, "color");
        if (!j.contains("text_align") || !j["text_align"].is_string())
            schema_error(id, "text_align");
        auto align = text_align_from_name(j["text_align"].get<std::string>());
        if (!align) schema_error(id, "text_align");
        t.text_align = *align;
        auto cap = j.find("capitalize");
        if (cap == j.end()) schema_error(id, "capitalize");
        if (cap->is_boolean()) t.capitalize = cap->get<bool>();
        else if (cap->is_string()) t.capitalize = cap->get<std::string>() == "true";
        else schema_error(id, "capitalize");
        t.letter_spacing = num("letter_spacing");
        t.line_height = num("line_height");
        rec.text = std::move(t);
    }
    return rec;
}

ordered_json attrs_to_json(const ElementAttributes& rec) {
    ordered_json j;
    j["index"] = rec.index;
    j["left"] = rec.bbox.left;
    j["top"] = rec.bbox.top;
    j["width"] = rec.bbox.width;
    j["height"] = rec.bbox.height;
    if (rec.text) {
        const TextAttributes& t = *rec.text;
        j["angle"] = t.angle;
        j["font"] = t.font;
        j["font_size"] = t.font_size;
        j["color"] = {t.color.r, t.color.g, t.color.b};
        j["text_align"] = std::string(text_align_name(t.text_align));
        j["capitalize"] = t.capitalize ? "true" : "false";
        j["letter_spacing"] = t.letter_spacing;
        j["line_height"] = t.line_height;
    }
    return j;
}

json load_json_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw DatasetError("cannot open " + path);
    json j;
    try {
        f >> j;
    } catch (const json::exception& e) {
        throw DatasetError("bad JSON in " + path + ": " + e.what());
    }
    return j;
}

ElementManifest manifest_from_json(const json& j, const std::string& asset_root,
                                   const std::string& fallback_id) {
    ElementManifest m;
    m.id = j.value("id", fallback_id);
    if (!j.contains("canvas") || !j["canvas"].is_object()) schema_error(m.id, "canvas");
    const json& canvas = j["canvas"];
    m.canvas.width = require_int_field(canvas, "width", m.id);
    m.canvas.height = require_int_field(canvas, "height", m.id);
    if (canvas.contains("background_color"))
        m.canvas.background_color = color_from_json(canvas["background_color"], m.id,
                                                    "background_color");

    if (!j.contains("elements") || !j["elements"].is_array()) schema_error(m.id, "elements");
    bool any_role = false, all_roles = true;
    LayerPlan plan;
    for (const json& ej : j["elements"]) {
        if (!ej.is_object() || !ej.contains("id")) schema_error(m.id, "elements[].id");
        Element e;
        e.id = ej["id"].get<std::string>();
        const std::string modality = ej.value("modality", "");
        if (modality == "image") {
            e.modality = Modality::Image;
            const std::string rel = ej.value("image_path", "");
            if (rel.empty()) schema_error(e.id, "image_path");
            // Corpus records hold root-relative paths; standalone manifests
            // may be file-relative. Try the given root, then its parent.
            fs::path path = asset_root.empty() ? fs::path(rel) : fs::path(asset_root) / rel;
            if (!fs::exists(path) && !asset_root.empty())
                path = fs::path(asset_root).parent_path() / rel;
            if (!fs::exists(path)) throw DatasetError("MissingAsset(" + path.string() + ")");
            m.asset_paths[e.id] = rel;
            try {
                e.image_content = std::make_shared<Raster>(png::read_file(path.string()));
            } catch (const png::PngError& err) {
                throw DatasetError("MissingAsset(" + path.string() + "): " + err.what());
            }
            e.intrinsic_width = ej.value("width", e.image_content->width());
            e.intrinsic_height = ej.value("height", e.image_content->height());
        } else if (modality == "text") {
            e.modality = Modality::Text;
            if (!ej.contains("text") || !ej["text"].is_string()) schema_error(e.id, "text");
            e.text_content = ej["text"].get<std::string>();
        } else {
            schema_error(e.id, "modality");
        }

        if (ej.contains("role")) {
            auto role = role_from_name(ej["role"].get<std::string>());
            if (!role) schema_error(e.id, "role");
            plan.assign(e.id, *role);
            any_role = true;
        } else {
            all_roles = false;
        }
        if (ej.contains("attributes"))
            m.attributes[e.id] =
                attrs_from_json(ej["attributes"], e.id, e.modality == Modality::Text);
        m.elements.push_back(std::move(e));
    }
    if (any_role && !all_roles) schema_error(m.id, "role (partial role annotation)");
    if (any_role) m.plan = std::move(plan);
    return m;
}

} // namespace

ElementManifest load_element_manifest(const std::string& json_path,
                                      const std::string& asset_root) {
    const json j = load_json_file(json_path);
    const std::string root =
        asset_root.empty() ? fs::path(json_path).parent_path().string() : asset_root;
    return manifest_from_json(j, root, fs::path(json_path).stem().string());
}

std::pair<std::vector<Design>, CorpusManifest> load_corpus(const std::string& root,
                                                           const std::string& split) {
    CorpusManifest manifest;
    manifest.split = split;

    fs::path design_dir = fs::path(root) / "designs";
    if (!fs::exists(design_dir)) design_dir = root;
    if (!fs::exists(design_dir)) throw DatasetError("corpus root not found: " + root);

    std::optional<std::set<std::string>> split_ids;
    if (!split.empty()) {
        const fs::path split_file = fs::path(root) / "splits" / (split + ".txt");
        if (fs::exists(split_file)) {
            std::ifstream f(split_file);
            std::set<std::string> ids;
            std::string line;
            while (std::getline(f, line)) {
                while (!line.empty() && (line.back() == '\r' || line.back() == '\n'))
                    line.pop_back();
                if (!line.empty()) ids.insert(line);
            }
            split_ids = std::move(ids);
        }
    }

    std::vector<std::string> files;
    for (const auto& entry : fs::directory_iterator(design_dir))
        if (entry.is_regular_file() && entry.path().extension() == ".json")
            files.push_back(entry.path().string());
    std::sort(files.begin(), files.end());

    std::vector<Design> designs;
    std::set<std::string> vocab;
    for (const std::string& file : files) {
        ElementManifest m = load_element_manifest(file, root);
        if (split_ids && !split_ids->count(m.id)) continue;
        if (!m.plan) schema_error(m.id, "role");
        manifest.asset_paths[m.id] = m.asset_paths;
        Design d;
        d.id = m.id;
        d.canvas = m.canvas;
        d.elements = std::move(m.elements);
        d.plan = std::move(*m.plan);
        d.attributes = std::move(m.attributes);
        const auto violations = validate_design(d);
        if (!violations.empty())
            throw DatasetError("SchemaError(" + d.id + ", " + violations.front().rule + ": " +
                               violations.front().detail + ")");
        for (const auto& [id, rec] : d.attributes)
            if (rec.text) vocab.insert(rec.text->font);
        manifest.element_count_histogram[static_cast<int>(d.elements.size())] += 1;
        designs.push_back(std::move(d));
    }
    manifest.design_count = static_cast<int>(designs.size());
    manifest.font_vocabulary.assign(vocab.begin(), vocab.end());
    return {std::move(designs), std::move(manifest)};
}

std::string design_to_json(const Design& d,
                           const std::map<std::string, std::string>& asset_paths) {
    ordered_json j;
    j["id"] = d.id;
    j["canvas"] = {{"width", d.canvas.width},
                   {"height", d.canvas.height},
                   {"background_color",
                    {d.canvas.background_color.r, d.canvas.background_color.g,
                     d.canvas.background_color.b}}};
    j["elements"] = ordered_json::array();
    for (const Element& e : d.elements) {
        ordered_json ej;
        ej["id"] = e.id;
        ej["modality"] = e.modality == Modality::Image ? "image" : "text";
        if (e.modality == Modality::Image) {
            auto it = asset_paths.find(e.id);
            ej["image_path"] = it != asset_paths.end() ? it->second : (e.id + ".png");
            ej["width"] = e.intrinsic_width;
            ej["height"] = e.intrinsic_height;
        } else {
            ej["text"] = e.text_content;
        }
        if (auto role = d.plan.role_of(e.id)) ej["role"] = std::string(role_name(*role));
        if (const ElementAttributes* rec = d.find_attributes(e.id))
            ej["attributes"] = attrs_to_json(*rec);
        j["elements"].push_back(std::move(ej));
    }
    return j.dump(2);
}

void save_design(const std::string& path, const Design& d,
                 const std::map<std::string, std::string>& asset_paths) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw DatasetError("cannot write " + path);
    f << design_to_json(d, asset_paths) << "\n";
}

std::pair<std::vector<Design>, std::vector<Design>> filter_by_element_count(
    const std::vector<Design>& designs, int max_elements) {
    std::vector<Design> kept, dropped;
    for (const Design& d : designs) {
        if (static_cast<int>(d.elements.size()) <= max_elements) kept.push_back(d);
        else dropped.push_back(d);
    }
    return {std::move(kept), std::move(dropped)};
}

namespace {

std::uint64_t fnv1a(const std::string& s, std::uint64_t h = 0xcbf29ce484222325ull) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

} // namespace

std::uint64_t state_content_hash(const Design& d, int level) {
    std::string key = std::to_string(d.canvas.width) + "x" + std::to_string(d.canvas.height) +
                      ":" + std::to_string(d.canvas.background_color.r) + "," +
                      std::to_string(d.canvas.background_color.g) + "," +
                      std::to_string(d.canvas.background_color.b) + ";";
    for (SemanticRole role : kLayerOrder) {
        if (role_index(role) > level) break;
        key += std::string(role_name(role)) + "[";
        for (const std::string& id : d.plan.layer(role)) {
            key += id + "=";
            if (const ElementAttributes* rec = d.find_attributes(id))
                key += serialize_record(*rec);
            key += ";";
        }
        key += "]";
    }
    return fnv1a(key);
}

CacheIndex cache_states(const std::vector<Design>& designs, const FontStore& store,
                        const std::string& cache_dir, const RenderOptions& opts) {
    fs::create_directories(cache_dir);
    CacheIndex index;
    std::mutex mu;
    // Exceptions must not escape the worksharing region; the first failing
    // design (by input order) is rethrown after the loop.
    std::vector<std::string> errors(designs.size());

    auto one = [&](const Design& d) {
        std::vector<CacheEntry> entries;
        int renders = 0, hits = 0;
        const fs::path dir = fs::path(cache_dir) / d.id;
        fs::create_directories(dir);
        // An attribute edit in layer k invalidates exactly the hashes of
        // G_k..G_5, so misses always form a suffix; resume from the last
        // cached state instead of re-rendering the prefix.
        Raster img;
        bool have_img = false;
        std::string prev_file;
        for (int level = 1; level <= 5; ++level) {
            const std::uint64_t h = state_content_hash(d, level);
            char name[64];
            std::snprintf(name, sizeof name, "G%d_%016llx.png", level,
                          static_cast<unsigned long long>(h));
            const fs::path file = dir / name;
            if (!have_img && fs::exists(file)) {
                ++hits;
                entries.push_back({level, file.string(), h});
                prev_file = file.string();
                continue;
            }
            if (!have_img) {
                img = prev_file.empty() ? blank_canvas(d.canvas) : png::read_file(prev_file);
                have_img = true;
            }
            composite_layer(img, d, kLayerOrder[level - 1], store, opts);
            const fs::path tmp = dir / (std::string(name) + ".tmp");
            png::write_file(tmp.string(), img);
            fs::rename(tmp, file);
            ++renders;
            entries.push_back({level, file.string(), h});
            prev_file = file.string();
        }
        std::lock_guard lock(mu);
        index.designs[d.id] = std::move(entries);
        index.renders_performed += renders;
        index.cache_hits += hits;
    };

    auto guarded = [&](std::size_t i) {
        try {
            one(designs[i]);
        } catch (const std::exception& e) {
            errors[i] = std::string(e.what());
            if (errors[i].empty()) errors[i] = "render failed";
        }
    };
#ifdef DCOMP_HAVE_OPENMP
    if (par::mode() == par::Mode::Parallel) {
#pragma omp parallel for schedule(dynamic)
        for (std::size_t i = 0; i < designs.size(); ++i) guarded(i);
    } else
#endif
    {
        for (std::size_t i = 0; i < designs.size(); ++i) guarded(i);
    }
    for (std::size_t i = 0; i < designs.size(); ++i)
        if (!errors[i].empty())
            throw DatasetError("cache_states: design " + designs[i].id + ": " + errors[i]);

    // Persist the index.
    ordered_json j;
    for (const auto& [id, entries] : index.designs) {
        ordered_json rows = ordered_json::array();
        for (const CacheEntry& e : entries) {
            char hash_hex[32];
            std::snprintf(hash_hex, sizeof hash_hex, "%016llx",
                          static_cast<unsigned long long>(e.hash));
            rows.push_back({{"level", e.level}, {"file", e.file}, {"hash", hash_hex}});
        }
        j[id] = std::move(rows);
    }
    std::ofstream f(fs::path(cache_dir) / "index.json", std::ios::trunc);
    f << j.dump(2) << "\n";
    return index;
}

SaliencyMap compute_saliency(const Raster& raster) {
    return spectral_residual_saliency(raster);
}

SaliencyMap load_saliency_map(const std::string& path, int canvas_w, int canvas_h) {
    const Raster img = png::read_file(path);
    FloatPlane plane(img.width(), img.height());
    const int c = img.channels();
    for (int y = 0; y < img.height(); ++y) {
        const std::uint8_t* p = img.row(y);
        for (int x = 0; x < img.width(); ++x, p += c)
            plane.at(x, y) = static_cast<float>(p[0]) / 255.0f;
    }
    if (plane.width() != canvas_w || plane.height() != canvas_h)
        plane = kern::resize_bilinear(plane, canvas_w, canvas_h);
    return plane;
}

} // namespace dcomp
