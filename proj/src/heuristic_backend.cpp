// heuristic_backend.cpp
// SPDX-License-Identifier: Apache-2.0
#include "dcomp/heuristic_backend.hpp"

#include <algorithm>
#include <cmath>

#include "dcomp/rng.hpp"
#include "dcomp/text_layout.hpp"

namespace dcomp {

namespace {

int iround(double v) { return static_cast<int>(std::lround(v)); }

BBox fit_into(int iw, int ih, int bw, int bh) {
    if (iw <= 0 || ih <= 0) return BBox{0, 0, bw, bh};
    const double s = std::min(static_cast<double>(bw) / iw, static_cast<double>(bh) / ih);
    return BBox{0, 0, std::max(1, iround(iw * s)), std::max(1, iround(ih * s))};
}

BBox clamp_on_canvas(BBox b, int w, int h) {
    b.width = std::min(b.width, w);
    b.height = std::min(b.height, h);
    b.left = std::clamp(b.left, 0, w - b.width);
    b.top = std::clamp(b.top, 0, h - b.height);
    return b;
}

struct AnnouncedItem {
    int index = 0;
    bool is_image = true;
    std::string text;
};

struct ParsedTurn {
    SemanticRole role = SemanticRole::Background;
    bool null_input = false;
    std::vector<AnnouncedItem> items;
};

/// Reads "Now predict the <role> elements: ..." back out of a human turn.
ParsedTurn parse_request(const std::string& human) {
    ParsedTurn out;
    const std::string marker = "Now predict the ";
    const auto m = human.rfind(marker);
    if (m == std::string::npos) throw BackendError("heuristic: no layer request in turn");
    const auto elements_at = human.find(" elements: ", m);
    if (elements_at == std::string::npos)
        throw BackendError("heuristic: malformed layer request");
    const std::string role_str = human.substr(m + marker.size(), elements_at - m - marker.size());
    const auto role = role_from_name(role_str);
    if (!role) throw BackendError("heuristic: unknown layer \"" + role_str + "\"");
    out.role = *role;

    std::string rest = human.substr(elements_at + std::string(" elements: ").size());
    if (rest == "null") {
        out.null_input = true;
        return out;
    }
    std::size_t pos = 0;
    const std::string tok = "element ";
    while (pos < rest.size()) {
        if (rest.compare(pos, tok.size(), tok) != 0)
            throw BackendError("heuristic: cannot parse announced element list");
        pos += tok.size();
        std::size_t colon = rest.find(": ", pos);
        if (colon == std::string::npos) throw BackendError("heuristic: missing index separator");
        AnnouncedItem item;
        item.index = std::stoi(rest.substr(pos, colon - pos));
        pos = colon + 2;
        std::size_t next = rest.find(", element ", pos);
        std::string payload =
            next == std::string::npos ? rest.substr(pos) : rest.substr(pos, next - pos);
        if (payload == "<image>") {
            item.is_image = true;
        } else {
            item.is_image = false;
            item.text = payload;
        }
        out.items.push_back(std::move(item));
        pos = next == std::string::npos ? rest.size() : next + 2;
    }
    return out;
}

double mean_luma(const Raster& img, const BBox& box) {
    auto clipped = clip_to_canvas(box, img.width(), img.height());
    if (!clipped) return 1.0;
    double sum = 0;
    std::int64_t n = 0;
    const int c = img.channels();
    for (int y = clipped->top; y < clipped->bottom(); ++y) {
        const std::uint8_t* p = img.px(clipped->left, y);
        for (int x = 0; x < clipped->width; ++x, p += c) {
            sum += (0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2]) / 255.0;
            ++n;
        }
    }
    return n ? sum / n : 1.0;
}

constexpr double kTextLadder[5] = {0.060, 0.042, 0.032, 0.026, 0.022};

} // namespace

HeuristicComposer::HeuristicComposer(std::vector<Element> roster, LayerPlan plan,
                                     const FontStore* store, FontVocabulary vocab,
                                     std::uint64_t seed, bool jitter)
    : roster_(std::move(roster)),
      plan_(std::move(plan)),
      store_(store),
      vocab_(std::move(vocab)),
      seed_(seed),
      jitter_(jitter) {}

std::unique_ptr<Backend> HeuristicComposer::with_seed(std::uint64_t seed) const {
    return std::make_unique<HeuristicComposer>(roster_, plan_, store_, vocab_, seed, true);
}

const HeuristicComposer::Layout& HeuristicComposer::layout_for(const Canvas& canvas) const {
    std::lock_guard lock(mu_);
    const auto key = std::make_pair(canvas.width, canvas.height);
    auto it = layouts_.find(key);
    if (it == layouts_.end()) it = layouts_.emplace(key, compute_layout(canvas)).first;
    return it->second;
}

HeuristicComposer::Layout HeuristicComposer::compute_layout(const Canvas& canvas) const {
    Layout layout;
    const int W = canvas.width, H = canvas.height;
    auto element = [&](const std::string& id) -> const Element* {
        for (const Element& e : roster_)
            if (e.id == id) return &e;
        return nullptr;
    };

    for (const std::string& id : plan_.layer(SemanticRole::Background))
        layout.boxes[id] = BBox{0, 0, W, H};

    // Text stack near the top; shrink the ladder if it would collide with
    // the image band.
    const auto& text_ids = plan_.layer(SemanticRole::Text);
    std::vector<int> sizes(text_ids.size());
    std::vector<BBox> tboxes(text_ids.size());
    double scale_pass = 1.0;
    for (int pass = 0; pass < 2; ++pass) {
        int y = iround(0.08 * H);
        for (std::size_t k = 0; k < text_ids.size(); ++k) {
            const Element* e = element(text_ids[k]);
            const double frac = kTextLadder[std::min<std::size_t>(k, 4)] * scale_pass;
            const int fs = std::max(10, iround(frac * H));
            int lines = 1;
            for (char c : e ? e->text_content : std::string()) lines += c == '\n';
            double advance = 0;
            if (e) {
                std::string longest;
                std::string cur;
                for (char c : e->text_content + "\n") {
                    if (c == '\n') {
                        if (cur.size() > longest.size()) longest = cur;
                        cur.clear();
                    } else {
                        cur += c;
                    }
                }
                advance = store_ ? measure_line(longest, fs, 0.0, store_->fallback())
                                 : 0.55 * fs * static_cast<double>(longest.size());
            }
            BBox b;
            b.width = std::clamp(iround(advance), iround(0.05 * W), iround(0.90 * W));
            b.height = std::max(fs, fs * lines);
            b.left = (W - b.width) / 2;
            b.top = y;
            y += b.height + iround(0.5 * fs);
            sizes[k] = fs;
            tboxes[k] = b;
        }
        if (text_ids.empty() || y <= iround(0.44 * H) || pass == 1) break;
        scale_pass = 0.44 * H / std::max(1, y);
    }
    double text_center = 0.5 * H;
    if (!text_ids.empty()) {
        const int top = tboxes.front().top;
        const int bottom = tboxes.back().bottom();
        text_center = 0.5 * (top + bottom);
        for (std::size_t k = 0; k < text_ids.size(); ++k) {
            layout.boxes[text_ids[k]] = tboxes[k];
            layout.font_sizes[text_ids[k]] = sizes[k];
        }
    }

    // Underlay plates behind the text block.
    const auto& under_ids = plan_.layer(SemanticRole::Underlay);
    if (!under_ids.empty()) {
        const int uw = iround(0.90 * W);
        std::vector<int> heights;
        int total = 0;
        const int gap = iround(0.02 * H);
        for (const std::string& id : under_ids) {
            const Element* e = element(id);
            int h = iround(0.10 * H);
            if (e && e->intrinsic_width > 0)
                h = iround(static_cast<double>(uw) * e->intrinsic_height / e->intrinsic_width);
            h = std::clamp(h, iround(0.04 * H), iround(0.22 * H));
            heights.push_back(std::max(4, h));
            total += heights.back();
        }
        total += gap * (static_cast<int>(under_ids.size()) - 1);
        int y = iround(text_center - total / 2.0);
        for (std::size_t k = 0; k < under_ids.size(); ++k) {
            BBox b{(W - uw) / 2, y, uw, heights[k]};
            layout.boxes[under_ids[k]] = clamp_on_canvas(b, W, H);
            y += heights[k] + gap;
        }
    }

    // Images: largest in the middle band, the rest along the bottom.
    std::vector<std::string> image_ids = plan_.layer(SemanticRole::LogoImage);
    std::stable_sort(image_ids.begin(), image_ids.end(),
                     [&](const std::string& a, const std::string& b) {
                         auto area = [&](const std::string& id) {
                             const Element* e = element(id);
                             return e ? static_cast<std::int64_t>(e->intrinsic_width) *
                                            e->intrinsic_height
                                      : 0;
                         };
                         return area(a) > area(b);
                     });
    for (std::size_t k = 0; k < image_ids.size(); ++k) {
        const Element* e = element(image_ids[k]);
        const int iw = e ? e->intrinsic_width : 1, ih = e ? e->intrinsic_height : 1;
        BBox b;
        if (k == 0) {
            b = fit_into(iw, ih, iround(0.55 * W), iround(0.30 * H));
            b.left = (W - b.width) / 2;
            b.top = iround(0.58 * H) - b.height / 2;
        } else {
            const std::size_t slot = k - 1;
            const int col = static_cast<int>(slot % 4);
            const int row = static_cast<int>(slot / 4);
            b = fit_into(iw, ih, iround(0.20 * W), iround(0.18 * H));
            b.left = iround(0.04 * W) + col * iround(0.24 * W);
            b.top = iround(0.78 * H) + row * iround(0.11 * H);
        }
        layout.boxes[image_ids[k]] = clamp_on_canvas(b, W, H);
    }

    // Embellishments: canvas corners, sized so they always stay scoreable.
    const auto& emb_ids = plan_.layer(SemanticRole::Embellishment);
    const int side = std::max(4, iround(0.034 * std::sqrt(static_cast<double>(W) * H)));
    for (std::size_t k = 0; k < emb_ids.size(); ++k) {
        const Element* e = element(emb_ids[k]);
        BBox b = fit_into(e ? e->intrinsic_width : 1, e ? e->intrinsic_height : 1, side, side);
        const int inset = iround(0.02 * std::min(W, H)) + static_cast<int>(k / 4) * side;
        const int corner = static_cast<int>(k % 4);
        b.left = (corner % 2 == 0) ? inset : W - inset - b.width;
        b.top = (corner / 2 == 0) ? inset : H - inset - b.height;
        layout.boxes[emb_ids[k]] = clamp_on_canvas(b, W, H);
    }

    // Seeded jitter for design variation; backgrounds stay pinned.
    if (jitter_) {
        for (auto& [id, box] : layout.boxes) {
            if (plan_.role_of(id) == SemanticRole::Background) continue;
            DetRng rng(seed_ ^ std::hash<std::string>{}(id));
            box.left += iround((rng.next_unit() - 0.5) * 0.03 * W);
            box.top += iround((rng.next_unit() - 0.5) * 0.03 * H);
            box = clamp_on_canvas(box, W, H);
        }
    }
    return layout;
}

std::string HeuristicComposer::respond(const Conversation& so_far) {
    if (so_far.turns.empty()) throw BackendError("heuristic: empty conversation");
    // Under a parse-repair flow the last human turn is the corrective
    // instruction; answer the most recent turn that actually requests a
    // layer.
    const Turn* turn = nullptr;
    for (auto it = so_far.turns.rbegin(); it != so_far.turns.rend(); ++it)
        if (it->human.find("Now predict the ") != std::string::npos) {
            turn = &*it;
            break;
        }
    if (!turn) throw BackendError("heuristic: no layer request in conversation");
    const ParsedTurn req = parse_request(turn->human);
    if (req.null_input) return "{}";

    const Layout& layout = layout_for(so_far.canvas);

    // Announced items map onto the tail of the layer's plan order (new
    // members are always appended after existing ones).
    const auto& layer_ids = plan_.layer(req.role);
    const std::size_t n = layer_ids.size(), m = req.items.size();

    const Raster* state = nullptr;
    for (const ImageSlot& slot : turn->images)
        if (slot.label.rfind("state:", 0) == 0 && slot.image) state = slot.image.get();

    LayerOutput out;
    out.role = req.role;
    for (std::size_t j = 0; j < m; ++j) {
        const std::string* id = nullptr;
        if (m <= n) id = &layer_ids[n - m + j];
        ElementAttributes rec;
        rec.index = req.items[j].index;
        rec.element_id = id ? *id : "";
        BBox box{0, 0, so_far.canvas.width / 4, so_far.canvas.height / 4};
        if (id) {
            auto it = layout.boxes.find(*id);
            if (it != layout.boxes.end()) box = it->second;
        }
        rec.bbox = box;
        if (!req.items[j].is_image) {
            TextAttributes t;
            t.font = vocab_.fonts().empty() ? "default" : vocab_.fonts().front();
            t.font_size = 24;
            if (id) {
                auto it = layout.font_sizes.find(*id);
                if (it != layout.font_sizes.end()) t.font_size = it->second;
            }
            t.text_align = TextAlign::Center;
            t.capitalize = false;
            t.letter_spacing = 0.0;
            t.line_height = 1.0;
            const double luma = state ? mean_luma(*state, box) : 0.0;
            t.color = luma > 0.5 ? Rgb{0, 0, 0} : Rgb{255, 255, 255};
            rec.text = std::move(t);
        }
        out.records.push_back(std::move(rec));
    }
    return serialize_layer_output(out);
}

} // namespace dcomp
