// mkfixtures.cpp
// SPDX-License-Identifier: Apache-2.0
//
// Regenerates the binary test fixtures: the golden final render of the
// worked example, its replay transcript in export JSONL form, and a small
// demo corpus for the CLI. Run from the repository root.

#include <filesystem>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "dcomp/composer.hpp"
#include "dcomp/dataset.hpp"
#include "dcomp/heuristic_backend.hpp"
#include "dcomp/planner.hpp"
#include "dcomp/png_io.hpp"
#include "dcomp/protocol.hpp"
#include "dcomp/renderer.hpp"
#include "testutil.hpp"

namespace fs = std::filesystem;
using namespace dcomp;

int main() {
    const fs::path data = testutil::data_dir();
    fs::create_directories(data);

    const Design poster = testutil::example_poster();
    const auto& store = testutil::shared_font_store();

    // Golden final render, antialiasing off for pixel-exact comparison.
    RenderOptions opts;
    opts.antialias = false;
    const CanvasState g5 = render_state(poster, 5, store, opts);
    png::write_file((data / "example_poster_g5.png").string(), g5.image);
    std::cout << "wrote " << (data / "example_poster_g5.png") << "\n";

    // Replay record in the export JSONL shape, built from the hand-written
    // transcript fixture so the two stay in sync.
    {
        std::ifstream in(data / "example_poster_transcript.json");
        nlohmann::json transcript;
        in >> transcript;
        nlohmann::ordered_json record;
        record["design_id"] = poster.id;
        record["seed"] = nullptr;
        record["canvas"] = {{"width", poster.canvas.width}, {"height", poster.canvas.height}};
        record["turns"] = nlohmann::ordered_json::array();
        for (const auto& t : transcript["turns"])
            record["turns"].push_back(
                {{"human", t["human"]}, {"assistant", t["assistant"]}});
        record["images"] = nlohmann::ordered_json::array();
        std::ofstream out(data / "example_poster_replay.jsonl", std::ios::trunc);
        out << record.dump() << "\n";
        std::cout << "wrote " << (data / "example_poster_replay.jsonl") << "\n";
    }

    // Demo corpus: the worked example plus two heuristic-composed designs
    // that exercise underlays and embellishments in `eval` and `export`.
    const fs::path corpus = data / "demo_corpus";
    fs::create_directories(corpus / "designs");
    fs::create_directories(corpus / "assets");

    auto save_with_assets = [&](const Design& d) {
        std::map<std::string, std::string> asset_paths;
        for (const Element& e : d.elements) {
            if (e.modality != Modality::Image) continue;
            const std::string rel = "assets/" + d.id + "_" + e.id + ".png";
            png::write_file((corpus / rel).string(), *e.image_content);
            asset_paths[e.id] = rel;
        }
        save_design((corpus / "designs" / (d.id + ".json")).string(), d, asset_paths);
    };
    save_with_assets(poster);

    const FontVocabulary vocab({"Raleway", "DejaVuSans", "DejaVuSerif"});
    auto composed_demo = [&](const std::string& id, const Canvas& canvas,
                             std::vector<Element> elements, std::uint64_t seed) {
        const LayerPlan plan = plan_layers(elements, canvas, PlannerMode::Heuristic);
        HeuristicComposer backend(elements, plan, &store, vocab, seed, seed != 0);
        ComposeOptions opts;
        opts.seed = seed;
        auto result = compose(elements, canvas, plan, backend, store, vocab, opts);
        result.design.id = id;
        save_with_assets(result.design);
    };

    {
        std::vector<Element> elements;
        Element bg = make_image_element("bg", testutil::patterned_raster(90, 160, 11));
        bg.intrinsic_width = 900;
        bg.intrinsic_height = 1600;
        elements.push_back(bg);
        elements.push_back(make_image_element(
            "plate", testutil::flat_raster(400, 120, Rgb{235, 235, 240})));
        elements.push_back(make_text_element("title", "Weekend market"));
        elements.push_back(make_text_element("when", "Saturday 9-14"));
        Element photo = make_image_element("photo", testutil::patterned_raster(80, 60, 12));
        photo.intrinsic_width = 400;
        photo.intrinsic_height = 300;
        elements.push_back(photo);
        Raster sprite(24, 24, 4, 0);
        for (int y = 6; y < 18; ++y)
            for (int x = 6; x < 18; ++x) {
                auto* p = sprite.px(x, y);
                p[0] = 240;
                p[1] = 180;
                p[2] = 30;
                p[3] = 255;
            }
        Element star = make_image_element("star", std::move(sprite));
        star.intrinsic_width = 24;
        star.intrinsic_height = 24;
        elements.push_back(star);
        composed_demo("weekend-market", Canvas{900, 1600}, std::move(elements), 0);
    }
    {
        std::vector<Element> elements;
        Element bg = make_image_element("bg", testutil::patterned_raster(160, 90, 21));
        bg.intrinsic_width = 1600;
        bg.intrinsic_height = 900;
        elements.push_back(bg);
        elements.push_back(make_text_element("headline", "Open studio"));
        composed_demo("open-studio", Canvas{1600, 900}, std::move(elements), 0);
    }

    {
        std::ofstream vocab_file(corpus / "fonts.txt", std::ios::trunc);
        vocab_file << "Raleway\nDejaVuSans\nDejaVuSerif\n";
    }
    std::cout << "wrote demo corpus under " << corpus << "\n";
    return 0;
}
