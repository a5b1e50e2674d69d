// test_font.cpp
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <vector>

#include "dcomp/font.hpp"
#include "testutil.hpp"

using namespace dcomp;

TEST_CASE("loads a TrueType face and resolves glyphs") {
    const TrueTypeFace face = TrueTypeFace::load_file(testutil::fonts_dir() + "/DejaVuSans.ttf");
    CHECK(face.units_per_em() > 0);
    CHECK(face.ascent() > 0);
    CHECK(face.descent() < 0);

    const auto gi_A = face.glyph_index('A');
    const auto gi_g = face.glyph_index('g');
    CHECK(gi_A != 0);
    CHECK(gi_g != 0);
    CHECK(gi_A != gi_g);
    CHECK(face.glyph_index(0x10FFFF) == 0);

    CHECK(face.advance_width(gi_A) > 0);

    const auto outline = face.glyph_outline(gi_A);
    CHECK_FALSE(outline.empty());
    // Contours close: every segment's end is the next segment's start.
    for (const GlyphContour& c : outline) {
        REQUIRE_FALSE(c.empty());
        for (std::size_t i = 0; i + 1 < c.size(); ++i) {
            CHECK(c[i].x1 == doctest::Approx(c[i + 1].x0));
            CHECK(c[i].y1 == doctest::Approx(c[i + 1].y0));
        }
        CHECK(c.back().x1 == doctest::Approx(c.front().x0));
        CHECK(c.back().y1 == doctest::Approx(c.front().y0));
    }
}

TEST_CASE("composite glyphs resolve (accented latin)") {
    const TrueTypeFace face = TrueTypeFace::load_file(testutil::fonts_dir() + "/DejaVuSans.ttf");
    const auto gi = face.glyph_index(0xC9);  // E acute
    REQUIRE(gi != 0);
    CHECK_FALSE(face.glyph_outline(gi).empty());
}

TEST_CASE("space has advance but no outline") {
    const TrueTypeFace face = TrueTypeFace::load_file(testutil::fonts_dir() + "/DejaVuSans.ttf");
    const auto gi = face.glyph_index(' ');
    CHECK(face.advance_width(gi) > 0);
    CHECK(face.glyph_outline(gi).empty());
}

TEST_CASE("font store falls back and logs the substitution") {
    std::vector<std::string> substituted;
    FontStore store(testutil::fonts_dir(), testutil::fonts_dir() + "/fallback.ttf",
                    [&](const std::string& family) { substituted.push_back(family); });

    CHECK(store.has_family("DejaVuSans"));
    CHECK_FALSE(store.has_family("Raleway"));

    const TrueTypeFace& missing = store.face("Raleway");
    CHECK(&missing == &store.fallback());
    REQUIRE(substituted.size() == 1);
    CHECK(substituted[0] == "Raleway");

    const TrueTypeFace& present = store.face("DejaVuSerif");
    CHECK(&present != &store.fallback());
    CHECK(substituted.size() == 1);  // no extra log

    // Cached: the same face object comes back.
    CHECK(&store.face("Raleway") == &missing);
}

TEST_CASE("missing fallback fails construction") {
    CHECK_THROWS_AS(FontStore("/nonexistent", "/nonexistent/fallback.ttf"), FontError);
}
