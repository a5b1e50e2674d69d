// protocol.hpp
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dcomp/model.hpp"

namespace dcomp {

enum class CodecErrorKind {
    MalformedJson,
    UnknownIndex,
    MissingElement,
    OutOfVocabFont,
    MissingRequiredKey,
    LevelMismatch,
};

struct CodecError : std::runtime_error {
    CodecError(CodecErrorKind k, std::string message)
        : std::runtime_error(std::move(message)), kind(k) {}
    CodecErrorKind kind;
};

/// Closed set of font-family names; serialized outputs must stay inside it.
class FontVocabulary {
public:
    FontVocabulary() = default;
    explicit FontVocabulary(std::vector<std::string> fonts);
    static FontVocabulary load_file(const std::string& path);

    bool contains(const std::string& family) const;
    const std::vector<std::string>& fonts() const { return fonts_; }
    void add(const std::string& family);

private:
    std::vector<std::string> fonts_;
};

/// One announced element of a layer input line.
struct LayerItem {
    int index = 0;
    std::string element_id;
    bool is_image = true;
    std::string text;  // text content when !is_image
};

struct LayerInput {
    SemanticRole role = SemanticRole::Background;
    std::vector<LayerItem> items;
    bool empty() const { return items.empty(); }
    const LayerItem* find_index(int index) const;
};

struct LayerOutput {
    SemanticRole role = SemanticRole::Background;
    std::vector<ElementAttributes> records;
};

/// "Now predict the <layer> elements: ..." with `null` for empty layers,
/// `element k: <image>` for rasters and `element k: <text>` for text.
std::string serialize_layer_input(const LayerInput& input);

/// One record as a compact JSON object with the pinned key order:
/// index,left,top,width,height and for text additionally angle,font,
/// font_size,color,text_align,capitalize,letter_spacing,line_height.
/// capitalize is serialized as the strings "true"/"false".
std::string serialize_record(const ElementAttributes& record);

/// `{}` for an empty layer; otherwise the records' objects joined by
/// newlines, in record order.
std::string serialize_layer_output(const LayerOutput& output);

/// Tolerant inverse of serialize_layer_output: accepts one object, a
/// concatenation of objects, or an array; numeric strings are coerced;
/// unknown keys are ignored. Every announced element must be covered.
LayerOutput parse_layer_output(const std::string& text, const LayerInput& expected,
                               const FontVocabulary& vocab);

struct ImageSlot {
    std::string label;  // "element:<id>" or "state:<level>"
    std::shared_ptr<const Raster> image;
};

struct Turn {
    std::string human;
    std::string assistant;
    std::vector<ImageSlot> images;  // one per <image> token, in order
};

struct Conversation {
    Canvas canvas;
    std::vector<Turn> turns;
};

std::string canvas_preamble(const Canvas& canvas);

/// Human message for turn i in 1..5. Turn 1 carries the canvas preamble and
/// no canvas-state slot (prev level must be 0); turns 2..5 prepend
/// "current canvas state: <image>. " with the G_{i-1} raster bound to the
/// slot. item_images runs parallel to input.items (null for text items).
/// Throws CodecError(LevelMismatch) when prev_state_level != i-1.
Turn build_turn(int turn_number, const LayerInput& input,
                std::shared_ptr<const Raster> prev_state_image, int prev_state_level,
                const Canvas& canvas,
                const std::vector<std::shared_ptr<const Raster>>& item_images);

/// The five layer inputs of a planned element set, indices assigned in plan
/// order. Image items reference the element rasters.
std::array<LayerInput, 5> build_layer_inputs(const std::vector<Element>& elements,
                                             const LayerPlan& plan);

/// Five-turn ground-truth transcript of a fully attributed design. States
/// must be the G1..G4 renders. A null seed keeps the stored within-layer
/// order (identity shuffle); otherwise within-layer order is shuffled by
/// the pinned generator and indices are reassigned contiguously.
Conversation export_training_conversation(
    const Design& design, std::optional<std::uint64_t> seed,
    const std::array<std::shared_ptr<const Raster>, 4>& states_g1_g4);

} // namespace dcomp
