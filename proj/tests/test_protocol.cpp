// test_protocol.cpp
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <fstream>

#include <json.hpp>

#include "dcomp/protocol.hpp"
#include "dcomp/renderer.hpp"
#include "dcomp/rng.hpp"
#include "testutil.hpp"

using namespace dcomp;

namespace {

nlohmann::json load_transcript_fixture() {
    std::ifstream f(testutil::data_dir() + "/example_poster_transcript.json");
    REQUIRE(f.good());
    nlohmann::json j;
    f >> j;
    return j;
}

std::array<LayerInput, 5> example_inputs() {
    const Design d = testutil::example_poster();
    return build_layer_inputs(d.elements, d.plan);
}

} // namespace

TEST_CASE("layer input serialization") {
    const auto inputs = example_inputs();
    CHECK(serialize_layer_input(inputs[0]) ==
          "Now predict the background elements: element 0: <image>");
    CHECK(serialize_layer_input(inputs[1]) == "Now predict the underlay elements: null");
    CHECK(serialize_layer_input(inputs[2]) ==
          "Now predict the logo/image elements: element 1: <image>");
    CHECK(serialize_layer_input(inputs[3]) ==
          "Now predict the text elements: element 2: Spring Clean, element 3: Best hacks");
    CHECK(serialize_layer_input(inputs[4]) == "Now predict the embellishment elements: null");
}

TEST_CASE("record serialization matches the worked example") {
    const Design d = testutil::example_poster();
    CHECK(serialize_record(d.attributes.at("e0")) ==
          "{\"index\":0,\"left\":3,\"top\":-5,\"width\":1101,\"height\":460}");
    const std::string t3 = serialize_record(d.attributes.at("e3"));
    CHECK(t3.find("\"font\":\"Raleway\"") != std::string::npos);
    CHECK(t3.find("\"font_size\":68") != std::string::npos);
    CHECK(t3.find("\"color\":[0,0,0]") != std::string::npos);
    CHECK(t3.find("\"capitalize\":\"false\"") != std::string::npos);
    CHECK(t3.find("\"letter_spacing\":0.0") != std::string::npos);
    CHECK(t3.find("\"line_height\":1.0") != std::string::npos);

    LayerOutput empty;
    CHECK(serialize_layer_output(empty) == "{}");
}

TEST_CASE("parse accepts concatenated objects and arrays; rejects junk") {
    const auto inputs = example_inputs();
    const auto vocab = testutil::example_vocab();
    const Design d = testutil::example_poster();

    LayerOutput text_layer;
    text_layer.role = SemanticRole::Text;
    text_layer.records = {d.attributes.at("e2"), d.attributes.at("e3")};
    const std::string two = serialize_layer_output(text_layer);

    SUBCASE("round trip of the text turn") {
        const LayerOutput parsed = parse_layer_output(two, inputs[3], vocab);
        REQUIRE(parsed.records.size() == 2);
        CHECK(parsed.records[0] == d.attributes.at("e2"));
        CHECK(parsed.records[1] == d.attributes.at("e3"));
    }
    SUBCASE("array form parses too") {
        const std::string arr =
            "[" + serialize_record(d.attributes.at("e2")) + "," +
            serialize_record(d.attributes.at("e3")) + "]";
        CHECK(parse_layer_output(arr, inputs[3], vocab).records.size() == 2);
    }
    SUBCASE("pretty-printed single object with numeric strings") {
        const std::string pretty = R"({
            "index": "0",
            "left": 3.0,
            "top": -5,
            "width": "1101",
            "height": 460,
            "confidence": 0.9
        })";
        const LayerOutput parsed = parse_layer_output(pretty, inputs[0], vocab);
        REQUIRE(parsed.records.size() == 1);
        CHECK(parsed.records[0].bbox == BBox{3, -5, 1101, 460});
    }
    SUBCASE("empty object against empty layer") {
        CHECK(parse_layer_output("{}", inputs[1], vocab).records.empty());
    }
    SUBCASE("boolean capitalize accepted") {
        std::string t = two;
        const auto pos = t.find("\"capitalize\":\"false\"");
        t.replace(pos, std::string("\"capitalize\":\"false\"").size(), "\"capitalize\":false");
        CHECK(parse_layer_output(t, inputs[3], vocab).records.size() == 2);
    }

    SUBCASE("errors carry their kinds") {
        auto kind_of = [&](const std::string& text, const LayerInput& in) {
            try {
                parse_layer_output(text, in, vocab);
            } catch (const CodecError& e) {
                return e.kind;
            }
            return CodecErrorKind::LevelMismatch;  // sentinel: no error
        };
        CHECK(kind_of("not json at all", inputs[0]) == CodecErrorKind::MalformedJson);
        CHECK(kind_of("{\"index\":9,\"left\":0,\"top\":0,\"width\":1,\"height\":1}",
                      inputs[0]) == CodecErrorKind::UnknownIndex);
        CHECK(kind_of("{}", inputs[0]) == CodecErrorKind::MissingElement);
        CHECK(kind_of("{\"index\":0,\"left\":0,\"top\":0,\"width\":1}", inputs[0]) ==
              CodecErrorKind::MissingRequiredKey);
        std::string bad_font = two;
        const auto pos = bad_font.find("Raleway");
        bad_font.replace(pos, 7, "NoSuchFont");
        CHECK(kind_of(bad_font, inputs[3]) == CodecErrorKind::OutOfVocabFont);
    }
}

TEST_CASE("round trip property over randomized layers") {
    DetRng rng(2024);
    const FontVocabulary vocab({"Raleway", "Mono", "A B", "quo\"te"});
    int checked = 0;
    for (int trial = 0; trial < 500; ++trial) {
        LayerInput input;
        input.role = kLayerOrder[rng.next_below(5)];
        const bool text_layer = input.role == SemanticRole::Text;
        const int n = static_cast<int>(rng.next_below(5));
        LayerOutput out;
        out.role = input.role;
        for (int k = 0; k < n; ++k) {
            LayerItem item;
            item.index = static_cast<int>(rng.next_below(40)) + k * 40;  // unique
            item.element_id = "el" + std::to_string(item.index);
            item.is_image = !text_layer;
            if (!item.is_image) item.text = "content";
            input.items.push_back(item);

            ElementAttributes rec;
            rec.element_id = item.element_id;
            rec.index = item.index;
            rec.bbox = BBox{static_cast<int>(rng.next_below(2000)) - 1000,
                            static_cast<int>(rng.next_below(2000)) - 1000,
                            static_cast<int>(rng.next_below(1500)),
                            static_cast<int>(rng.next_below(1500))};
            if (text_layer) {
                TextAttributes t;
                t.angle = static_cast<double>(rng.next_below(721)) / 2.0 - 180.0;
                t.font = vocab.fonts()[rng.next_below(vocab.fonts().size())];
                t.font_size = 1 + static_cast<int>(rng.next_below(300));
                t.color = Rgb{static_cast<std::uint8_t>(rng.next_below(256)),
                              static_cast<std::uint8_t>(rng.next_below(256)),
                              static_cast<std::uint8_t>(rng.next_below(256))};
                t.text_align = static_cast<TextAlign>(rng.next_below(3));
                t.capitalize = rng.next_below(2) == 1;
                t.letter_spacing = static_cast<double>(rng.next_below(400)) / 16.0;
                t.line_height = (1.0 + static_cast<double>(rng.next_below(64))) / 16.0;
                rec.text = t;
            }
            out.records.push_back(rec);
        }
        const LayerOutput parsed = parse_layer_output(serialize_layer_output(out), input, vocab);
        REQUIRE(parsed.records.size() == out.records.size());
        for (std::size_t i = 0; i < out.records.size(); ++i)
            CHECK(parsed.records[i] == out.records[i]);
        ++checked;
    }
    CHECK(checked == 500);
}

TEST_CASE("build_turn binds states and enforces levels") {
    const Design d = testutil::example_poster();
    const auto inputs = example_inputs();
    const auto g1 = std::make_shared<const Raster>(
        render_state(d, 1, testutil::shared_font_store()).image);

    const Turn t1 = build_turn(1, inputs[0], nullptr, 0, d.canvas,
                               {d.elements[0].image_content});
    CHECK(t1.human.rfind("a poster of canvas width 1080px, canvas height 1920px.", 0) == 0);
    CHECK(t1.human.find("current canvas state") == std::string::npos);
    REQUIRE(t1.images.size() == 1);
    CHECK(t1.images[0].label == "element:e0");

    const Turn t2 = build_turn(2, inputs[1], g1, 1, d.canvas, {});
    CHECK(t2.human == "current canvas state: <image>. Now predict the underlay elements: null");
    REQUIRE(t2.images.size() == 1);
    CHECK(t2.images[0].label == "state:1");

    CHECK_THROWS_AS(build_turn(2, inputs[1], g1, 0, d.canvas, {}), CodecError);
}

TEST_CASE("export with identity shuffle reproduces the stored transcript") {
    const Design d = testutil::example_poster();
    const auto& store = testutil::shared_font_store();
    std::array<std::shared_ptr<const Raster>, 4> states;
    for (int i = 1; i <= 4; ++i)
        states[i - 1] = std::make_shared<const Raster>(render_state(d, i, store).image);

    const Conversation conv = export_training_conversation(d, std::nullopt, states);
    const auto fixture = load_transcript_fixture();
    REQUIRE(conv.turns.size() == 5);
    REQUIRE(fixture["turns"].size() == 5);
    for (int i = 0; i < 5; ++i) {
        CHECK(conv.turns[i].human == fixture["turns"][i]["human"].get<std::string>());
        CHECK(conv.turns[i].assistant == fixture["turns"][i]["assistant"].get<std::string>());
    }
}

TEST_CASE("shuffle keeps the layer partition and reassigns contiguous indices") {
    Design d = testutil::example_poster();
    // Add a second logo/image element so shuffling has something to move.
    d.elements.push_back(make_image_element("e4", testutil::patterned_raster(40, 30, 4)));
    d.plan.assign("e4", SemanticRole::LogoImage);
    ElementAttributes rec;
    rec.element_id = "e4";
    rec.index = 4;
    rec.bbox = BBox{10, 10, 40, 30};
    d.attributes["e4"] = rec;

    const auto& store = testutil::shared_font_store();
    std::array<std::shared_ptr<const Raster>, 4> states;
    for (int i = 1; i <= 4; ++i)
        states[i - 1] = std::make_shared<const Raster>(render_state(d, i, store).image);

    const Conversation a = export_training_conversation(d, 7, states);
    const Conversation b = export_training_conversation(d, 7, states);
    REQUIRE(a.turns.size() == 5);
    for (int i = 0; i < 5; ++i) {
        CHECK(a.turns[i].human == b.turns[i].human);  // fixed seed: byte-deterministic
        CHECK(a.turns[i].assistant == b.turns[i].assistant);
    }

    // Any seed: layers keep their members; indices stay contiguous 0..n-1.
    for (std::uint64_t seed : {1ull, 2ull, 3ull, 99ull}) {
        const Conversation c = export_training_conversation(d, seed, states);
        CHECK(c.turns[0].human.find("element 0: <image>") != std::string::npos);
        CHECK(c.turns[1].human.find("null") != std::string::npos);
        // logo/image announces exactly indices 1 and 2 in some order.
        const std::string& logo = c.turns[2].human;
        const bool order_a = logo.find("element 1: <image>, element 2: <image>") != std::string::npos;
        CHECK(order_a);
        // text announces 3 and 4 with the two contents in some order.
        const std::string& text = c.turns[3].human;
        CHECK(text.find("element 3: ") != std::string::npos);
        CHECK(text.find("element 4: ") != std::string::npos);
        CHECK(text.find("Spring Clean") != std::string::npos);
        CHECK(text.find("Best hacks") != std::string::npos);
    }
}

TEST_CASE("two seeds differ only in within-layer order") {
    Design d = testutil::example_poster();
    const auto& store = testutil::shared_font_store();
    std::array<std::shared_ptr<const Raster>, 4> states;
    for (int i = 1; i <= 4; ++i)
        states[i - 1] = std::make_shared<const Raster>(render_state(d, i, store).image);
    // With two text elements there are two possible text-turn orders; find
    // two seeds that differ.
    const Conversation a = export_training_conversation(d, 1, states);
    bool found_different = false;
    for (std::uint64_t seed = 2; seed < 40 && !found_different; ++seed) {
        const Conversation b = export_training_conversation(d, seed, states);
        if (b.turns[3].human != a.turns[3].human) {
            found_different = true;
            CHECK(b.turns[0].human == a.turns[0].human);
            CHECK(b.turns[1].human == a.turns[1].human);
            CHECK(b.turns[2].human == a.turns[2].human);
        }
    }
    CHECK(found_different);
}

TEST_CASE("empty layers serialize as null and {} in export") {
    const Design d = testutil::example_poster();
    const auto& store = testutil::shared_font_store();
    std::array<std::shared_ptr<const Raster>, 4> states;
    for (int i = 1; i <= 4; ++i)
        states[i - 1] = std::make_shared<const Raster>(render_state(d, i, store).image);
    const Conversation conv = export_training_conversation(d, std::nullopt, states);
    CHECK(conv.turns[1].assistant == "{}");
    CHECK(conv.turns[4].assistant == "{}");
}

TEST_CASE("parser survives arbitrary junk and mutated records") {
    DetRng rng(1717);
    const auto inputs = example_inputs();
    const auto vocab = testutil::example_vocab();
    const Design d = testutil::example_poster();
    LayerOutput text_layer;
    text_layer.role = SemanticRole::Text;
    text_layer.records = {d.attributes.at("e2"), d.attributes.at("e3")};
    const std::string good = serialize_layer_output(text_layer);

    for (int trial = 0; trial < 2000; ++trial) {
        std::string s;
        if (rng.next_below(2) == 0) {
            const int len = static_cast<int>(rng.next_below(60));
            for (int i = 0; i < len; ++i)
                s += static_cast<char>(32 + rng.next_below(95));
        } else {
            s = good;
            const int edits = 1 + static_cast<int>(rng.next_below(4));
            for (int e = 0; e < edits && !s.empty(); ++e) {
                const std::size_t pos = rng.next_below(s.size());
                switch (rng.next_below(3)) {
                    case 0: s[pos] = static_cast<char>(32 + rng.next_below(95)); break;
                    case 1: s.erase(pos, 1); break;
                    default: s.insert(pos, 1, static_cast<char>(32 + rng.next_below(95)));
                }
            }
        }
        try {
            parse_layer_output(s, inputs[3], vocab);
        } catch (const CodecError&) {
            // expected for most mutations
        }
    }
}

TEST_CASE("image slots line up with <image> tokens for any shuffle") {
    Design d = testutil::example_poster();
    d.elements.push_back(make_image_element("e4", testutil::patterned_raster(24, 24, 9)));
    d.plan.assign("e4", SemanticRole::Embellishment);
    ElementAttributes rec;
    rec.element_id = "e4";
    rec.index = 4;
    rec.bbox = BBox{5, 5, 24, 24};
    d.attributes["e4"] = rec;

    const auto& store = testutil::shared_font_store();
    std::array<std::shared_ptr<const Raster>, 4> states;
    for (int i = 1; i <= 4; ++i)
        states[i - 1] = std::make_shared<const Raster>(render_state(d, i, store).image);

    auto count_tokens = [](const std::string& s) {
        std::size_t n = 0, pos = 0;
        while ((pos = s.find("<image>", pos)) != std::string::npos) {
            ++n;
            pos += 7;
        }
        return n;
    };
    for (std::uint64_t seed = 0; seed < 12; ++seed) {
        const Conversation conv = export_training_conversation(
            d, seed ? std::optional<std::uint64_t>(seed) : std::nullopt, states);
        for (const Turn& turn : conv.turns) {
            CHECK(count_tokens(turn.human) == turn.images.size());
            for (const ImageSlot& slot : turn.images) {
                CHECK_FALSE(slot.label.empty());
                CHECK(slot.image != nullptr);
            }
        }
    }
}

TEST_CASE("canvas states report their baked layers") {
    CanvasState g0{0, Raster()};
    CHECK(g0.baked_layers().empty());
    CanvasState g3{3, Raster()};
    const auto baked = g3.baked_layers();
    REQUIRE(baked.size() == 3);
    CHECK(baked[0] == SemanticRole::Background);
    CHECK(baked[2] == SemanticRole::LogoImage);
}

TEST_CASE("font vocabulary file io") {
    const std::string path = "/tmp/dcomp_vocab_test.txt";
    {
        std::ofstream f(path, std::ios::trunc);
        f << "Raleway\nOpen Sans\r\n\nMono\n";
    }
    const FontVocabulary vocab = FontVocabulary::load_file(path);
    CHECK(vocab.fonts().size() == 3);
    CHECK(vocab.contains("Raleway"));
    CHECK(vocab.contains("Open Sans"));
    CHECK(vocab.contains("Mono"));
    CHECK_FALSE(vocab.contains("Other"));
}
