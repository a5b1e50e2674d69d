// protocol.cpp
// SPDX-License-Identifier: Apache-2.0
#include "dcomp/protocol.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>

#include <json.hpp>

#include "dcomp/rng.hpp"

namespace dcomp {

using nlohmann::json;

FontVocabulary::FontVocabulary(std::vector<std::string> fonts) : fonts_(std::move(fonts)) {}

FontVocabulary FontVocabulary::load_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw CodecError(CodecErrorKind::MalformedJson, "cannot open font vocabulary: " + path);
    std::vector<std::string> fonts;
    std::string line;
    while (std::getline(f, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
        if (!line.empty()) fonts.push_back(line);
    }
    return FontVocabulary(std::move(fonts));
}

bool FontVocabulary::contains(const std::string& family) const {
    return std::find(fonts_.begin(), fonts_.end(), family) != fonts_.end();
}

void FontVocabulary::add(const std::string& family) {
    if (!contains(family)) fonts_.push_back(family);
}

const LayerItem* LayerInput::find_index(int index) const {
    for (const LayerItem& it : items)
        if (it.index == index) return &it;
    return nullptr;
}

namespace {

std::string json_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    return out;
}

std::string shortest_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

/// Always keeps a fractional part ("0.0", "1.0", "1.15"), matching the
/// spacing/line-height wire form.
std::string fmt_decimal(double v) {
    if (std::floor(v) == v && std::abs(v) < 1e15)
        return std::to_string(static_cast<long long>(v)) + ".0";
    return shortest_double(v);
}

/// Integral angles print as plain integers.
std::string fmt_angle(double v) {
    if (std::floor(v) == v && std::abs(v) < 1e15)
        return std::to_string(static_cast<long long>(v));
    return shortest_double(v);
}

} // namespace

std::string serialize_layer_input(const LayerInput& input) {
    std::string out = "Now predict the ";
    out += role_name(input.role);
    out += " elements: ";
    if (input.empty()) {
        out += "null";
        return out;
    }
    bool first = true;
    for (const LayerItem& item : input.items) {
        if (!first) out += ", ";
        first = false;
        out += "element " + std::to_string(item.index) + ": ";
        out += item.is_image ? "<image>" : item.text;
    }
    return out;
}

std::string serialize_record(const ElementAttributes& record) {
    std::string out = "{";
    out += "\"index\":" + std::to_string(record.index);
    out += ",\"left\":" + std::to_string(record.bbox.left);
    out += ",\"top\":" + std::to_string(record.bbox.top);
    out += ",\"width\":" + std::to_string(record.bbox.width);
    out += ",\"height\":" + std::to_string(record.bbox.height);
    if (record.text) {
        const TextAttributes& t = *record.text;
        out += ",\"angle\":" + fmt_angle(t.angle);
        out += ",\"font\":\"" + json_escape(t.font) + "\"";
        out += ",\"font_size\":" + std::to_string(t.font_size);
        out += ",\"color\":[" + std::to_string(t.color.r) + "," + std::to_string(t.color.g) +
               "," + std::to_string(t.color.b) + "]";
        out += ",\"text_align\":\"" + std::string(text_align_name(t.text_align)) + "\"";
        out += std::string(",\"capitalize\":\"") + (t.capitalize ? "true" : "false") + "\"";
        out += ",\"letter_spacing\":" + fmt_decimal(t.letter_spacing);
        out += ",\"line_height\":" + fmt_decimal(t.line_height);
    }
    out += "}";
    return out;
}

std::string serialize_layer_output(const LayerOutput& output) {
    if (output.records.empty()) return "{}";
    std::string out;
    for (std::size_t i = 0; i < output.records.size(); ++i) {
        if (i) out += "\n";
        out += serialize_record(output.records[i]);
    }
    return out;
}

namespace {

/// Splits tolerant model output into top-level JSON objects: one object,
/// side-by-side objects (optionally comma separated), or one array.
std::vector<json> split_objects(const std::string& text) {
    std::vector<json> out;
    std::size_t i = 0;
    auto skip_filler = [&] {
        while (i < text.size() &&
               (std::isspace(static_cast<unsigned char>(text[i])) || text[i] == ','))
            ++i;
    };
    skip_filler();
    if (i < text.size() && text[i] == '[') {
        json arr;
        try {
            arr = json::parse(text.substr(i));
        } catch (const json::exception& e) {
            throw CodecError(CodecErrorKind::MalformedJson, e.what());
        }
        for (auto& o : arr) {
            if (!o.is_object())
                throw CodecError(CodecErrorKind::MalformedJson, "array entry is not an object");
            out.push_back(std::move(o));
        }
        return out;
    }
    while (i < text.size()) {
        if (text[i] != '{')
            throw CodecError(CodecErrorKind::MalformedJson,
                             "unexpected character at offset " + std::to_string(i));
        int depth = 0;
        bool in_string = false;
        std::size_t start = i;
        for (; i < text.size(); ++i) {
            const char c = text[i];
            if (in_string) {
                if (c == '\\')
                    ++i;
                else if (c == '"')
                    in_string = false;
                continue;
            }
            if (c == '"') in_string = true;
            else if (c == '{') ++depth;
            else if (c == '}') {
                if (--depth == 0) {
                    ++i;
                    break;
                }
            }
        }
        if (depth != 0)
            throw CodecError(CodecErrorKind::MalformedJson, "unbalanced braces");
        try {
            out.push_back(json::parse(text.substr(start, i - start)));
        } catch (const json::exception& e) {
            throw CodecError(CodecErrorKind::MalformedJson, e.what());
        }
        skip_filler();
    }
    return out;
}

double to_number(const json& v, const std::string& key) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        const std::string s = v.get<std::string>();
        double d = 0;
        const auto res = std::from_chars(s.data(), s.data() + s.size(), d);
        if (res.ec == std::errc() && res.ptr == s.data() + s.size()) return d;
    }
    throw CodecError(CodecErrorKind::MalformedJson, "non-numeric value for \"" + key + "\"");
}

const json& require_key(const json& obj, const char* key, int index) {
    auto it = obj.find(key);
    if (it == obj.end())
        throw CodecError(CodecErrorKind::MissingRequiredKey,
                         std::string("missing key \"") + key + "\" in record for index " +
                             std::to_string(index));
    return *it;
}

int require_int(const json& obj, const char* key, int index) {
    return static_cast<int>(std::llround(to_number(require_key(obj, key, index), key)));
}

double require_double(const json& obj, const char* key, int index) {
    return to_number(require_key(obj, key, index), key);
}

} // namespace

LayerOutput parse_layer_output(const std::string& text, const LayerInput& expected,
                               const FontVocabulary& vocab) {
    LayerOutput out;
    out.role = expected.role;

    std::vector<json> objects = split_objects(text);
    // A single key-less object is the empty-layer marker.
    if (objects.size() == 1 && objects[0].empty()) objects.clear();

    std::set<int> seen;
    for (const json& obj : objects) {
        if (!obj.is_object())
            throw CodecError(CodecErrorKind::MalformedJson, "record is not an object");
        auto idx_it = obj.find("index");
        if (idx_it == obj.end())
            throw CodecError(CodecErrorKind::MissingRequiredKey, "record without \"index\"");
        const int index = static_cast<int>(std::llround(to_number(*idx_it, "index")));
        const LayerItem* item = expected.find_index(index);
        if (!item)
            throw CodecError(CodecErrorKind::UnknownIndex,
                             "index " + std::to_string(index) + " was not announced");
        if (!seen.insert(index).second)
            throw CodecError(CodecErrorKind::MalformedJson,
                             "duplicate record for index " + std::to_string(index));

        ElementAttributes rec;
        rec.element_id = item->element_id;
        rec.index = index;
        rec.bbox.left = require_int(obj, "left", index);
        rec.bbox.top = require_int(obj, "top", index);
        rec.bbox.width = require_int(obj, "width", index);
        rec.bbox.height = require_int(obj, "height", index);

        if (!item->is_image) {
            TextAttributes t;
            t.angle = require_double(obj, "angle", index);
            const json& font = require_key(obj, "font", index);
            if (!font.is_string())
                throw CodecError(CodecErrorKind::MalformedJson, "\"font\" is not a string");
            t.font = font.get<std::string>();
            if (!vocab.contains(t.font))
                throw CodecError(CodecErrorKind::OutOfVocabFont,
                                 "font \"" + t.font + "\" not in vocabulary");
            t.font_size = require_int(obj, "font_size", index);
            const json& color = require_key(obj, "color", index);
            if (!color.is_array() || color.size() != 3)
                throw CodecError(CodecErrorKind::MalformedJson, "\"color\" is not a 3-array");
            auto chan = [&](int k) {
                const double v = to_number(color[k], "color");
                return static_cast<std::uint8_t>(std::clamp(std::llround(v), 0ll, 255ll));
            };
            t.color = Rgb{chan(0), chan(1), chan(2)};
            const json& align = require_key(obj, "text_align", index);
            if (!align.is_string())
                throw CodecError(CodecErrorKind::MalformedJson, "\"text_align\" is not a string");
            auto al = text_align_from_name(align.get<std::string>());
            if (!al)
                throw CodecError(CodecErrorKind::MalformedJson,
                                 "unknown text_align \"" + align.get<std::string>() + "\"");
            t.text_align = *al;
            const json& cap = require_key(obj, "capitalize", index);
            if (cap.is_boolean()) {
                t.capitalize = cap.get<bool>();
            } else if (cap.is_string()) {
                std::string s = cap.get<std::string>();
                std::transform(s.begin(), s.end(), s.begin(),
                               [](unsigned char c) { return std::tolower(c); });
                if (s == "true") t.capitalize = true;
                else if (s == "false") t.capitalize = false;
                else
                    throw CodecError(CodecErrorKind::MalformedJson,
                                     "capitalize must be \"true\" or \"false\"");
            } else {
                throw CodecError(CodecErrorKind::MalformedJson, "capitalize has a bad type");
            }
            t.letter_spacing = require_double(obj, "letter_spacing", index);
            t.line_height = require_double(obj, "line_height", index);
            rec.text = std::move(t);
        }
        out.records.push_back(std::move(rec));
    }

    for (const LayerItem& item : expected.items)
        if (!seen.count(item.index))
            throw CodecError(CodecErrorKind::MissingElement,
                             "announced element index " + std::to_string(item.index) +
                                 " has no record");
    return out;
}

std::string canvas_preamble(const Canvas& canvas) {
    return "a poster of canvas width " + std::to_string(canvas.width) +
           "px, canvas height " + std::to_string(canvas.height) +
           "px. Please predict step by step according to the semantics of the elements. "
           "After each prediction, there will be an intermediate rendering result as a "
           "reference to better make the next prediction.";
}

Turn build_turn(int turn_number, const LayerInput& input,
                std::shared_ptr<const Raster> prev_state_image, int prev_state_level,
                const Canvas& canvas,
                const std::vector<std::shared_ptr<const Raster>>& item_images) {
    if (turn_number < 1 || turn_number > 5)
        throw CodecError(CodecErrorKind::LevelMismatch, "turn number out of range");
    if (prev_state_level != turn_number - 1)
        throw CodecError(CodecErrorKind::LevelMismatch,
                         "turn " + std::to_string(turn_number) + " requires canvas state G" +
                             std::to_string(turn_number - 1));
    Turn turn;
    if (turn_number == 1) {
        turn.human = canvas_preamble(canvas) + " " + serialize_layer_input(input);
    } else {
        if (!prev_state_image)
            throw CodecError(CodecErrorKind::LevelMismatch, "missing canvas state raster");
        turn.human = "current canvas state: <image>. " + serialize_layer_input(input);
        turn.images.push_back(
            {"state:" + std::to_string(prev_state_level), std::move(prev_state_image)});
    }
    for (std::size_t i = 0; i < input.items.size(); ++i) {
        if (!input.items[i].is_image) continue;
        std::shared_ptr<const Raster> img =
            i < item_images.size() ? item_images[i] : nullptr;
        turn.images.push_back({"element:" + input.items[i].element_id, std::move(img)});
    }
    return turn;
}

std::array<LayerInput, 5> build_layer_inputs(const std::vector<Element>& elements,
                                             const LayerPlan& plan) {
    std::map<std::string, const Element*> by_id;
    for (const Element& e : elements) by_id[e.id] = &e;

    std::array<LayerInput, 5> out;
    int next_index = 0;
    for (SemanticRole role : kLayerOrder) {
        LayerInput& input = out[role_index(role) - 1];
        input.role = role;
        for (const std::string& id : plan.layer(role)) {
            auto it = by_id.find(id);
            if (it == by_id.end())
                throw CodecError(CodecErrorKind::MissingElement,
                                 "plan references unknown element " + id);
            LayerItem item;
            item.index = next_index++;
            item.element_id = id;
            item.is_image = it->second->modality == Modality::Image;
            item.text = it->second->text_content;
            input.items.push_back(std::move(item));
        }
    }
    return out;
}

Conversation export_training_conversation(
    const Design& design, std::optional<std::uint64_t> seed,
    const std::array<std::shared_ptr<const Raster>, 4>& states_g1_g4) {
    for (const Element& e : design.elements)
        if (!design.attributes.count(e.id))
            throw CodecError(CodecErrorKind::MissingElement,
                             "design not fully attributed: " + e.id);

    LayerPlan plan = design.plan;
    if (seed) {
        DetRng rng(*seed);
        for (SemanticRole role : kLayerOrder) deterministic_shuffle(plan.layer(role), rng);
    }

    const auto inputs = build_layer_inputs(design.elements, plan);

    Conversation conv;
    conv.canvas = design.canvas;
    for (int i = 1; i <= 5; ++i) {
        const LayerInput& input = inputs[i - 1];
        std::vector<std::shared_ptr<const Raster>> item_images;
        for (const LayerItem& item : input.items) {
            const Element* e = design.find_element(item.element_id);
            item_images.push_back(e && e->image_content ? e->image_content : nullptr);
        }
        Turn turn = build_turn(i, input, i == 1 ? nullptr : states_g1_g4[i - 2],
                               i - 1, design.canvas, item_images);

        LayerOutput output;
        output.role = input.role;
        for (const LayerItem& item : input.items) {
            ElementAttributes rec = design.attributes.at(item.element_id);
            rec.index = item.index;  // reassigned after shuffling
            output.records.push_back(std::move(rec));
        }
        turn.assistant = serialize_layer_output(output);
        conv.turns.push_back(std::move(turn));
    }
    return conv;
}

} // namespace dcomp
