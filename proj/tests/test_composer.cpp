// test_composer.cpp
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <fstream>

#include <json.hpp>

#include "dcomp/composer.hpp"
#include "dcomp/heuristic_backend.hpp"
#include "dcomp/metrics.hpp"
#include "dcomp/planner.hpp"
#include "testutil.hpp"

using namespace dcomp;

namespace {

std::vector<std::string> fixture_assistant_turns() {
    std::ifstream f(testutil::data_dir() + "/example_poster_transcript.json");
    REQUIRE(f.good());
    nlohmann::json j;
    f >> j;
    std::vector<std::string> out;
    for (const auto& turn : j["turns"]) out.push_back(turn["assistant"].get<std::string>());
    return out;
}

} // namespace

TEST_CASE("replay composition reproduces the worked example attributes") {
    const Design expected = testutil::example_poster();
    ReplayBackend backend(fixture_assistant_turns());
    const auto result = compose(expected.elements, expected.canvas, expected.plan, backend,
                                testutil::shared_font_store(), testutil::example_vocab());
    REQUIRE(result.design.attributes.size() == 4);
    for (const auto& [id, rec] : expected.attributes) {
        REQUIRE(result.design.attributes.count(id));
        CHECK(result.design.attributes.at(id) == rec);
    }
    CHECK(result.trace.backend_calls == 5);
    CHECK(result.trace.conversation.turns.size() == 5);

    // Trace consistency: the stored states match re-renders of the design.
    const auto& store = testutil::shared_font_store();
    for (int i = 0; i <= 5; ++i)
        CHECK(result.trace.states[i] == render_state(result.design, i, store).image);
}

TEST_CASE("replay with malformed turn 3 and no retries fails layer 3") {
    auto turns = fixture_assistant_turns();
    turns[2] = "this is not a JSON object";
    ReplayBackend backend(std::move(turns));
    const Design base = testutil::example_poster();
    ComposeOptions opts;
    opts.max_parse_retries = 0;
    try {
        compose(base.elements, base.canvas, base.plan, backend,
                testutil::shared_font_store(), testutil::example_vocab(), opts);
        FAIL("expected LayerFailed");
    } catch (const LayerFailed& e) {
        CHECK(e.layer == 3);
    }
}

TEST_CASE("parse retries append a corrective turn and count in the trace") {
    auto turns = fixture_assistant_turns();
    // First answer for layer 1 is broken; the replay backend then serves the
    // real record on the corrective re-query.
    std::vector<std::string> with_retry = {std::string("oops"), turns[0], turns[1], turns[2],
                                           turns[3], turns[4]};
    ReplayBackend backend(std::move(with_retry));
    const Design base = testutil::example_poster();
    ComposeOptions opts;
    opts.max_parse_retries = 2;
    const auto result = compose(base.elements, base.canvas, base.plan, backend,
                                testutil::shared_font_store(), testutil::example_vocab(), opts);
    CHECK(result.trace.backend_calls == 6);  // 5 layers + 1 retry
    CHECK(result.trace.layers[0].retries == 1);
    // The corrective turn is part of the executed conversation.
    REQUIRE(result.trace.conversation.turns.size() == 6);
    CHECK(result.trace.conversation.turns[1].human.find("could not be parsed") !=
          std::string::npos);
    CHECK(result.design.attributes.at("e0").bbox == BBox{3, -5, 1101, 460});
}

TEST_CASE("heuristic composer: background fills the canvas, text centered") {
    Canvas canvas{1080, 1920};
    std::vector<Element> elements;
    Element photo = make_image_element("photo", testutil::patterned_raster(108, 192, 1));
    photo.intrinsic_width = 1080;
    photo.intrinsic_height = 1920;
    elements.push_back(photo);
    elements.push_back(make_text_element("txt", "SALE"));
    LayerPlan plan;
    plan.assign("photo", SemanticRole::Background);
    plan.assign("txt", SemanticRole::Text);

    HeuristicComposer backend(elements, plan, &testutil::shared_font_store(),
                              testutil::example_vocab());
    const auto result = compose(elements, canvas, plan, backend,
                                testutil::shared_font_store(), testutil::example_vocab());
    CHECK(result.design.attributes.at("photo").bbox == BBox{0, 0, 1080, 1920});
    const BBox t = result.design.attributes.at("txt").bbox;
    CHECK(t.left == (1080 - t.width) / 2);  // centered horizontally
    CHECK(validate_design(result.design).empty());
}

TEST_CASE("compose_partial keeps given layers byte-identical and counts queries") {
    const Design full = testutil::example_poster();
    const auto& store = testutil::shared_font_store();
    const auto vocab = testutil::example_vocab();

    for (int k : {1, 3, 5}) {
        // Strip attributes beyond layer k.
        Design given = full;
        for (const Element& e : full.elements) {
            const auto role = full.plan.role_of(e.id);
            if (role_index(*role) > k) given.attributes.erase(e.id);
        }
        // Serialize the given records before composition.
        std::map<std::string, std::string> before;
        for (const auto& [id, rec] : given.attributes) before[id] = serialize_record(rec);

        HeuristicComposer backend(full.elements, full.plan, &store, vocab);
        const auto result = compose_partial(given, k, backend, store, vocab);

        CHECK(result.trace.backend_calls == 5 - k);

        for (const auto& [id, text] : before) {
            REQUIRE(result.design.attributes.count(id));
            CHECK(serialize_record(result.design.attributes.at(id)) == text);
        }
        CHECK(result.design.attributes.size() == full.elements.size());
        if (k == 5) CHECK(result.trace.backend_calls == 0);
        for (int i = 0; i <= 5; ++i)
            CHECK(result.trace.states[i] == render_state(result.design, i, store).image);
    }
}

TEST_CASE("heuristic composer flips text color to white on dark backgrounds") {
    Canvas canvas{600, 800};
    std::vector<Element> elements;
    Element dark = make_image_element("bg", testutil::flat_raster(60, 80, Rgb{12, 12, 16}));
    dark.intrinsic_width = 600;
    dark.intrinsic_height = 800;
    elements.push_back(dark);
    elements.push_back(make_text_element("headline", "Night mode"));
    LayerPlan plan;
    plan.assign("bg", SemanticRole::Background);
    plan.assign("headline", SemanticRole::Text);

    const auto& store = testutil::shared_font_store();
    HeuristicComposer backend(elements, plan, &store, testutil::example_vocab());
    const auto result = compose(elements, canvas, plan, backend, store,
                                testutil::example_vocab());
    const auto& attrs = result.design.attributes.at("headline");
    REQUIRE(attrs.text.has_value());
    CHECK(attrs.text->color == Rgb{255, 255, 255});
}

TEST_CASE("heuristic backend answers the original request under a repair turn") {
    const Design d = testutil::example_poster();
    const auto& store = testutil::shared_font_store();
    const auto vocab = testutil::example_vocab();
    HeuristicComposer backend(d.elements, d.plan, &store, vocab);

    const auto inputs = build_layer_inputs(d.elements, d.plan);
    Conversation conv;
    conv.canvas = d.canvas;
    Turn request = build_turn(1, inputs[0], nullptr, 0, d.canvas,
                              {d.elements[0].image_content});
    request.assistant = "garbled";
    conv.turns.push_back(request);
    Turn corrective;
    corrective.human = "The previous response could not be parsed. Answer again.";
    conv.turns.push_back(corrective);

    const std::string text = backend.respond(conv);
    const LayerOutput parsed = parse_layer_output(text, inputs[0], vocab);
    REQUIRE(parsed.records.size() == 1);
    CHECK(parsed.records[0].bbox == BBox{0, 0, 1080, 1920});
}

TEST_CASE("compose_partial with k=0 queries every layer") {
    const Design full = testutil::example_poster();
    Design bare = full;
    bare.attributes.clear();
    const auto& store = testutil::shared_font_store();
    const auto vocab = testutil::example_vocab();
    HeuristicComposer backend(full.elements, full.plan, &store, vocab);
    const auto result = compose_partial(bare, 0, backend, store, vocab);
    CHECK(result.trace.backend_calls == 5);
    CHECK(result.design.attributes.size() == full.elements.size());
}

TEST_CASE("a 20-element set still composes to a valid design") {
    Canvas canvas{900, 1200};
    std::vector<Element> elements;
    Element bg = make_image_element("bg", testutil::patterned_raster(45, 60, 1));
    bg.intrinsic_width = 900;
    bg.intrinsic_height = 1200;
    elements.push_back(bg);
    for (int i = 0; i < 5; ++i)
        elements.push_back(make_text_element("t" + std::to_string(i), "line " + std::to_string(i)));
    for (int i = 0; i < 7; ++i) {
        Element e = make_image_element("m" + std::to_string(i),
                                       testutil::patterned_raster(40 + i, 30 + i, i));
        e.intrinsic_width = 300;
        e.intrinsic_height = 250;
        elements.push_back(e);
    }
    for (int i = 0; i < 4; ++i)
        elements.push_back(make_image_element("u" + std::to_string(i),
                                              testutil::flat_raster(200, 50, Rgb{220, 220, 230})));
    for (int i = 0; i < 3; ++i) {
        Raster sprite(12, 12, 4, 0);
        for (int k = 0; k < 12; ++k) {
            auto* p = sprite.px(k, 11 - k);
            p[0] = p[1] = p[2] = 30;
            p[3] = 255;
        }
        Element e = make_image_element("s" + std::to_string(i), std::move(sprite));
        e.intrinsic_width = 12;
        e.intrinsic_height = 12;
        elements.push_back(e);
    }
    REQUIRE(elements.size() == 20);

    const auto& store = testutil::shared_font_store();
    const auto vocab = testutil::example_vocab();
    const LayerPlan plan = plan_layers(elements, canvas, PlannerMode::Heuristic);
    HeuristicComposer backend(elements, plan, &store, vocab);
    const auto result = compose(elements, canvas, plan, backend, store, vocab);
    CHECK(validate_design(result.design).empty());
    CHECK(score_validity(result.design) == doctest::Approx(1.0));
}

TEST_CASE("compose_partial rejects bad prefixes") {
    const Design full = testutil::example_poster();
    const auto& store = testutil::shared_font_store();
    const auto vocab = testutil::example_vocab();
    HeuristicComposer backend(full.elements, full.plan, &store, vocab);

    SUBCASE("missing attribute inside the prefix") {
        Design given = full;
        given.attributes.erase("e0");
        CHECK_THROWS_AS(compose_partial(given, 1, backend, store, vocab),
                        std::invalid_argument);
    }
    SUBCASE("attributed element beyond the prefix") {
        CHECK_THROWS_AS(compose_partial(full, 3, backend, store, vocab),
                        std::invalid_argument);
    }
}

TEST_CASE("sample_variants: capability checks and pairwise difference") {
    const Design base = testutil::example_poster();
    const auto& store = testutil::shared_font_store();
    const auto vocab = testutil::example_vocab();

    SUBCASE("replay cannot sample more than one") {
        ReplayBackend backend(fixture_assistant_turns());
        CHECK_THROWS_AS(sample_variants(base.elements, base.canvas, base.plan, backend, store,
                                        vocab, 2),
                        BackendError);
    }
    SUBCASE("n=1 equals compose") {
        ReplayBackend b1(fixture_assistant_turns());
        ReplayBackend b2(fixture_assistant_turns());
        const auto one = sample_variants(base.elements, base.canvas, base.plan, b1, store,
                                         vocab, 1);
        const auto direct = compose(base.elements, base.canvas, base.plan, b2, store, vocab);
        REQUIRE(one.size() == 1);
        CHECK(one[0].design.attributes == direct.design.attributes);
    }
    SUBCASE("heuristic variants differ pairwise and stay valid") {
        HeuristicComposer backend(base.elements, base.plan, &store, vocab);
        ComposeOptions opts;
        opts.seed = 7;
        const auto variants = sample_variants(base.elements, base.canvas, base.plan, backend,
                                              store, vocab, 3, opts);
        REQUIRE(variants.size() == 3);
        for (const auto& v : variants) CHECK(validate_design(v.design).empty());
        for (int i = 0; i < 3; ++i)
            for (int j = i + 1; j < 3; ++j)
                CHECK(variants[i].design.attributes != variants[j].design.attributes);
    }
}

TEST_CASE("fill_elements adds only the new records and queries only their layers") {
    const Design base = testutil::example_poster();
    const auto& store = testutil::shared_font_store();
    const auto vocab = testutil::example_vocab();

    SUBCASE("zero new elements returns the base unchanged") {
        HeuristicComposer backend(base.elements, base.plan, &store, vocab);
        const auto result = fill_elements(base, {}, backend, store, vocab);
        CHECK(result.design.attributes == base.attributes);
        CHECK(result.trace.backend_calls == 0);
    }

    SUBCASE("one embellishment: single query, base untouched") {
        Raster sprite(32, 32, 4, 0);
        for (int y = 8; y < 24; ++y)
            for (int x = 8; x < 24; ++x) {
                auto* p = sprite.px(x, y);
                p[0] = 240;
                p[1] = 80;
                p[2] = 20;
                p[3] = 255;
            }
        Element e = make_image_element("spark", std::move(sprite));
        std::vector<Element> merged_roster = base.elements;
        merged_roster.push_back(e);
        LayerPlan merged_plan = base.plan;
        merged_plan.assign("spark", SemanticRole::Embellishment);
        HeuristicComposer backend(merged_roster, merged_plan, &store, vocab);

        const auto result = fill_elements(base, {e}, backend, store, vocab);
        CHECK(result.trace.backend_calls == 1);
        CHECK(result.design.attributes.size() == base.attributes.size() + 1);
        for (const auto& [id, rec] : base.attributes)
            CHECK(serialize_record(result.design.attributes.at(id)) == serialize_record(rec));
        const ElementAttributes& added = result.design.attributes.at("spark");
        CHECK(added.index == 4);  // continues after the existing indices

        // Trace consistency: re-rendering the merged design reproduces the
        // traced states.
        for (int i = 0; i <= 5; ++i)
            CHECK(result.trace.states[i] == render_state(result.design, i, store).image);
    }

    SUBCASE("new text + new embellishment: exactly two queries") {
        Element t = make_text_element("extra", "Now open");
        Raster sprite(16, 16, 4, 0);
        for (int i = 0; i < 16; ++i) {
            auto* p = sprite.px(i, i);
            p[0] = p[1] = p[2] = 10;
            p[3] = 255;
        }
        Element s = make_image_element("dot", std::move(sprite));

        std::vector<Element> merged_roster = base.elements;
        merged_roster.push_back(t);
        merged_roster.push_back(s);
        LayerPlan merged_plan = base.plan;
        merged_plan.assign("extra", SemanticRole::Text);
        merged_plan.assign("dot", SemanticRole::Embellishment);
        HeuristicComposer backend(merged_roster, merged_plan, &store, vocab);

        const auto result = fill_elements(base, {t, s}, backend, store, vocab);
        CHECK(result.trace.backend_calls == 2);
        CHECK(result.design.attributes.count("extra") == 1);
        CHECK(result.design.attributes.count("dot") == 1);
    }

    SUBCASE("duplicate id is rejected") {
        HeuristicComposer backend(base.elements, base.plan, &store, vocab);
        Element dup = make_text_element("e2", "dup");
        CHECK_THROWS_AS(fill_elements(base, {dup}, backend, store, vocab),
                        std::invalid_argument);
    }
}

TEST_CASE("resize_compose runs one composition per canvas with its own preamble") {
    const Design base = testutil::example_poster();
    const auto& store = testutil::shared_font_store();
    const auto vocab = testutil::example_vocab();
    HeuristicComposer backend(base.elements, base.plan, &store, vocab);

    const std::vector<Canvas> canvases = {Canvas{1080, 1920}, Canvas{1920, 1080}};
    const auto results = resize_compose(base.elements, base.plan, backend, store, vocab,
                                        canvases);
    REQUIRE(results.size() == 2);
    CHECK(results[0].trace.conversation.turns[0].human.find(
              "canvas width 1080px, canvas height 1920px") != std::string::npos);
    CHECK(results[1].trace.conversation.turns[0].human.find(
              "canvas width 1920px, canvas height 1080px") != std::string::npos);
    // Heuristic rule: the background box equals each canvas.
    CHECK(results[0].design.attributes.at("e0").bbox == BBox{0, 0, 1080, 1920});
    CHECK(results[1].design.attributes.at("e0").bbox == BBox{0, 0, 1920, 1080});

    CHECK_THROWS_AS(resize_compose(base.elements, base.plan, backend, store, vocab, {}),
                    std::invalid_argument);
}
