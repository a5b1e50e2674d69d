// test_dataset.cpp
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "dcomp/dataset.hpp"
#include "dcomp/png_io.hpp"
#include "testutil.hpp"

using namespace dcomp;
namespace fs = std::filesystem;

namespace {

/// Writes a small three-design corpus (one 2-element, two 4-element) under
/// a temp root and returns the root path.
std::string write_fixture_corpus() {
    const fs::path root = fs::temp_directory_path() / "dcomp_corpus_fixture";
    fs::remove_all(root);
    fs::create_directories(root / "designs");
    fs::create_directories(root / "assets");

    png::write_file((root / "assets/bg.png").string(), testutil::patterned_raster(60, 40, 1));
    png::write_file((root / "assets/fg.png").string(), testutil::patterned_raster(30, 30, 2));

    auto design_json = [&](const std::string& id, int elements) {
        std::string j = R"({"id":")" + id + R"(","canvas":{"width":200,"height":150},)";
        j += R"("elements":[)";
        j += R"({"id":"bg","modality":"image","image_path":"assets/bg.png","role":"background",)";
        j += R"("attributes":{"index":0,"left":0,"top":0,"width":200,"height":150}})";
        if (elements >= 2) {
            j += R"(,{"id":"fg","modality":"image","image_path":"assets/fg.png","role":"logo/image",)";
            j += R"("attributes":{"index":1,"left":40,"top":30,"width":60,"height":60}})";
        }
        if (elements >= 3) {
            j += R"(,{"id":"t1","modality":"text","text":"Hello","role":"text",)";
            j += R"("attributes":{"index":2,"left":20,"top":10,"width":120,"height":30,)";
            j += R"("angle":0,"font":"DejaVuSans","font_size":24,"color":[0,0,0],)";
            j += R"("text_align":"center","capitalize":"false","letter_spacing":0.0,"line_height":1.0}})";
        }
        if (elements >= 4) {
            j += R"(,{"id":"u1","modality":"image","image_path":"assets/fg.png","role":"underlay",)";
            j += R"("attributes":{"index":3,"left":10,"top":5,"width":150,"height":45}})";
        }
        j += "]}";
        return j;
    };
    std::ofstream(root / "designs/a.json") << design_json("a", 2);
    std::ofstream(root / "designs/b.json") << design_json("b", 4);
    std::ofstream(root / "designs/c.json") << design_json("c", 4);
    return root.string();
}

} // namespace

TEST_CASE("corpus loads with manifest histogram and vocabulary") {
    const std::string root = write_fixture_corpus();
    auto [designs, manifest] = load_corpus(root);
    REQUIRE(designs.size() == 3);
    CHECK(manifest.design_count == 3);
    CHECK(manifest.element_count_histogram.at(2) == 1);
    CHECK(manifest.element_count_histogram.at(4) == 2);
    REQUIRE(manifest.font_vocabulary.size() == 1);
    CHECK(manifest.font_vocabulary[0] == "DejaVuSans");
    for (const Design& d : designs) CHECK(validate_design(d).empty());
}

TEST_CASE("schema errors name the record and field") {
    const std::string root = write_fixture_corpus();
    std::ofstream(fs::path(root) / "designs/bad.json")
        << R"({"id":"bad","canvas":{"width":200},"elements":[]})";
    CHECK_THROWS_WITH_AS(load_corpus(root), doctest::Contains("height"), DatasetError);
}

TEST_CASE("missing asset is reported") {
    const std::string root = write_fixture_corpus();
    std::ofstream(fs::path(root) / "designs/noasset.json") << R"({
        "id":"noasset","canvas":{"width":200,"height":150},
        "elements":[{"id":"x","modality":"image","image_path":"assets/nope.png",
                     "role":"background",
                     "attributes":{"index":0,"left":0,"top":0,"width":10,"height":10}}]})";
    CHECK_THROWS_WITH_AS(load_corpus(root), doctest::Contains("MissingAsset"), DatasetError);
}

TEST_CASE("corpus round-trips through save and load") {
    const std::string root = write_fixture_corpus();
    auto [designs, manifest] = load_corpus(root);

    const fs::path copy_root = fs::temp_directory_path() / "dcomp_corpus_copy";
    fs::remove_all(copy_root);
    fs::create_directories(copy_root / "designs");
    fs::create_directories(copy_root / "assets");
    fs::copy(fs::path(root) / "assets", copy_root / "assets",
             fs::copy_options::overwrite_existing | fs::copy_options::recursive);

    for (const Design& d : designs) {
        std::map<std::string, std::string> asset_paths;
        for (const Element& e : d.elements)
            if (e.modality == Modality::Image)
                asset_paths[e.id] = e.id == "bg" ? "assets/bg.png" : "assets/fg.png";
        save_design((copy_root / "designs" / (d.id + ".json")).string(), d, asset_paths);
    }
    auto [again, manifest2] = load_corpus(copy_root.string());
    REQUIRE(again.size() == designs.size());
    for (std::size_t i = 0; i < designs.size(); ++i) {
        CHECK(again[i].id == designs[i].id);
        CHECK(again[i].canvas == designs[i].canvas);
        CHECK(again[i].attributes == designs[i].attributes);
        CHECK(again[i].plan.assignment == designs[i].plan.assignment);
        CHECK(again[i].plan.ordering == designs[i].plan.ordering);
    }
}

TEST_CASE("element-count filter keeps 25 and drops 26") {
    auto make_sized = [](int n) {
        Design d;
        d.id = "n" + std::to_string(n);
        d.canvas = Canvas{100, 100};
        for (int i = 0; i < n; ++i) {
            const std::string id = "e" + std::to_string(i);
            d.elements.push_back(make_text_element(id, "x"));
            d.plan.assign(id, SemanticRole::Text);
        }
        return d;
    };
    const auto [kept, dropped] = filter_by_element_count({make_sized(25), make_sized(26)}, 25);
    REQUIRE(kept.size() == 1);
    REQUIRE(dropped.size() == 1);
    CHECK(kept[0].id == "n25");
    CHECK(dropped[0].id == "n26");

    const auto [k2, d2] = filter_by_element_count({}, 25);
    CHECK(k2.empty());
    CHECK(d2.empty());
}

TEST_CASE("state cache renders once, then hits, then invalidates a suffix") {
    const std::string root = write_fixture_corpus();
    auto [designs, manifest] = load_corpus(root);
    const fs::path cache = fs::temp_directory_path() / "dcomp_cache_test";
    fs::remove_all(cache);

    const auto& store = testutil::shared_font_store();
    const CacheIndex first = cache_states(designs, store, cache.string());
    CHECK(first.renders_performed == 15);  // 3 designs x 5 states
    CHECK(first.cache_hits == 0);
    for (const auto& [id, entries] : first.designs) {
        REQUIRE(entries.size() == 5);
        for (const CacheEntry& e : entries) CHECK(fs::exists(e.file));
    }

    const CacheIndex second = cache_states(designs, store, cache.string());
    CHECK(second.renders_performed == 0);
    CHECK(second.cache_hits == 15);

    // Editing a layer-3 attribute re-renders exactly G3..G5 of that design.
    designs[1].attributes["fg"].bbox.left += 5;
    const CacheIndex third = cache_states(designs, store, cache.string());
    CHECK(third.renders_performed == 3);
    CHECK(third.cache_hits == 12);
}

TEST_CASE("saliency maps load from gray png and rescale") {
    Raster gray(8, 8, 1);
    for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x) *gray.px(x, y) = static_cast<std::uint8_t>(x * 32);
    const std::string path = "/tmp/dcomp_saliency_fixture.png";
    png::write_file(path, gray);
    const SaliencyMap map = load_saliency_map(path, 16, 16);
    CHECK(map.width() == 16);
    CHECK(map.height() == 16);
    CHECK(map.at(0, 0) == doctest::Approx(0.0f).epsilon(0.1));
    CHECK(map.at(15, 0) > 0.8f);
}
