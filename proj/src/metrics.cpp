// metrics.cpp
// SPDX-License-Identifier: Apache-2.0
#include "dcomp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "dcomp/geometry.hpp"
#include "dcomp/kernels.hpp"
#include "dcomp/parallel.hpp"

namespace dcomp {

namespace {

struct ScoredElement {
    const Element* element;
    const ElementAttributes* attrs;
    SemanticRole role;
    bool valid;  // clipped on-canvas area reaches the validity threshold
};

std::vector<ScoredElement> scorable_elements(const Design& d, const EligibilityPolicy& policy) {
    std::vector<ScoredElement> out;
    const double canvas_area = static_cast<double>(d.canvas.width) * d.canvas.height;
    for (const Element& e : d.elements) {
        auto role = d.plan.role_of(e.id);
        if (!role || *role == SemanticRole::Background) continue;
        const ElementAttributes* attrs = d.find_attributes(e.id);
        if (!attrs) continue;
        double clipped_area = 0;
        if (auto c = clip_to_canvas(attrs->bbox, d.canvas.width, d.canvas.height))
            clipped_area = static_cast<double>(area(*c));
        const bool valid = clipped_area >= policy.validity_min_area_fraction * canvas_area;
        out.push_back({&e, attrs, *role, valid});
    }
    return out;
}

struct NormBox {
    double l, t, w, h;
    double area() const { return w * h; }
    double r() const { return l + w; }
    double b() const { return t + h; }
};

NormBox normalized(const BBox& b, const Canvas& c) {
    return {static_cast<double>(b.left) / c.width, static_cast<double>(b.top) / c.height,
            static_cast<double>(b.width) / c.width, static_cast<double>(b.height) / c.height};
}

double norm_intersection_area(const NormBox& a, const NormBox& b) {
    const double w = std::min(a.r(), b.r()) - std::max(a.l, b.l);
    const double h = std::min(a.b(), b.b()) - std::max(a.t, b.t);
    return w > 0 && h > 0 ? w * h : 0.0;
}

std::vector<BBox> scorable_boxes(const Design& d, const EligibilityPolicy& policy) {
    std::vector<BBox> boxes;
    for (const ScoredElement& s : scorable_elements(d, policy)) boxes.push_back(s.attrs->bbox);
    return boxes;
}

} // namespace

double score_validity(const Design& d, const EligibilityPolicy& policy) {
    const auto scorable = scorable_elements(d, policy);
    if (scorable.empty()) throw MetricsError("NoScorableElements");
    const auto valid =
        std::count_if(scorable.begin(), scorable.end(), [](const ScoredElement& s) { return s.valid; });
    return static_cast<double>(valid) / static_cast<double>(scorable.size());
}

double score_overlap(const Design& d, const EligibilityPolicy& policy) {
    std::vector<NormBox> boxes;
    for (const ScoredElement& s : scorable_elements(d, policy))
        if (s.valid && s.role != SemanticRole::Underlay)
            boxes.push_back(normalized(s.attrs->bbox, d.canvas));
    if (boxes.size() < 2) return 0.0;
    double sum = 0;
    int pairs = 0;
    for (std::size_t i = 0; i < boxes.size(); ++i)
        for (std::size_t j = i + 1; j < boxes.size(); ++j) {
            const double inter = norm_intersection_area(boxes[i], boxes[j]);
            const double denom = std::min(boxes[i].area(), boxes[j].area());
            sum += denom > 0 ? inter / denom : 0.0;
            ++pairs;
        }
    return sum / pairs;
}

double score_alignment(const Design& d, const EligibilityPolicy& policy) {
    std::vector<NormBox> boxes;
    for (const ScoredElement& s : scorable_elements(d, policy))
        if (s.valid && s.role != SemanticRole::Underlay)
            boxes.push_back(normalized(s.attrs->bbox, d.canvas));
    if (boxes.size() < 2) return 0.0;

    auto axes = [](const NormBox& b) {
        return std::array<double, 6>{b.l, b.l + b.w / 2, b.r(), b.t, b.t + b.h / 2, b.b()};
    };
    double sum = 0;
    for (std::size_t i = 0; i < boxes.size(); ++i) {
        const auto ai = axes(boxes[i]);
        double best = 1.0;
        for (std::size_t j = 0; j < boxes.size(); ++j) {
            if (j == i) continue;
            const auto aj = axes(boxes[j]);
            for (int k = 0; k < 6; ++k) best = std::min(best, std::abs(ai[k] - aj[k]));
        }
        best = std::clamp(best, 0.0, 1.0 - policy.alignment_epsilon);
        sum += -std::log(1.0 - best);
    }
    return sum / static_cast<double>(boxes.size());
}

std::optional<UnderlayScores> score_underlay(const Design& d, const EligibilityPolicy& policy) {
    const auto scorable = scorable_elements(d, policy);
    std::vector<const ScoredElement*> underlays, others;
    for (const ScoredElement& s : scorable) {
        if (s.role == SemanticRole::Underlay) underlays.push_back(&s);
        else if (s.valid) others.push_back(&s);
    }
    if (underlays.empty()) return std::nullopt;

    UnderlayScores out;
    for (const ScoredElement* u : underlays) {
        const NormBox ub = normalized(u->attrs->bbox, d.canvas);
        double loose = 0;
        bool contained = false;
        for (const ScoredElement* e : others) {
            const NormBox eb = normalized(e->attrs->bbox, d.canvas);
            if (eb.area() <= 0) continue;
            const double inter = norm_intersection_area(ub, eb);
            loose = std::max(loose, inter / eb.area());
            if (eb.l >= ub.l && eb.t >= ub.t && eb.r() <= ub.r() && eb.b() <= ub.b())
                contained = true;
        }
        out.loose += loose;
        out.strict += contained ? 1.0 : 0.0;
    }
    out.loose /= static_cast<double>(underlays.size());
    out.strict /= static_cast<double>(underlays.size());
    return out;
}

double score_utility(const Design& d, const SaliencyMap& saliency,
                     const EligibilityPolicy& policy) {
    if (saliency.width() != d.canvas.width || saliency.height() != d.canvas.height)
        throw MetricsError("saliency map size does not match the canvas");
    const auto boxes = scorable_boxes(d, policy);
    const auto mask = kern::union_mask(boxes, d.canvas.width, d.canvas.height);
    const auto counts = kern::threshold_counts(saliency, mask,
                                               static_cast<float>(policy.saliency_threshold));
    if (counts.below == 0) throw MetricsError("EmptyNonSalientRegion");
    return static_cast<double>(counts.below_in_mask) / static_cast<double>(counts.below);
}

double score_occlusion(const Design& d, const SaliencyMap& saliency,
                       const EligibilityPolicy& policy) {
    if (saliency.width() != d.canvas.width || saliency.height() != d.canvas.height)
        throw MetricsError("saliency map size does not match the canvas");
    const auto boxes = scorable_boxes(d, policy);
    const auto mask = kern::union_mask(boxes, d.canvas.width, d.canvas.height);
    const auto ms = kern::masked_sum(saliency, mask);
    return ms.count == 0 ? 0.0 : ms.sum / static_cast<double>(ms.count);
}

double score_readability(const Design& d, const Raster& background_raster,
                         const EligibilityPolicy& policy) {
    if (background_raster.width() != d.canvas.width ||
        background_raster.height() != d.canvas.height)
        throw MetricsError("background raster size does not match the canvas");
    const auto grad = kern::gradient_magnitude(kern::to_grayscale(background_raster));

    double sum = 0;
    int texts = 0;
    for (const ScoredElement& s : scorable_elements(d, policy)) {
        if (s.role != SemanticRole::Text) continue;
        ++texts;
        auto clipped = clip_to_canvas(s.attrs->bbox, d.canvas.width, d.canvas.height);
        if (!clipped || area(*clipped) == 0) continue;
        double acc = 0;
        for (int y = clipped->top; y < clipped->bottom(); ++y)
            for (int x = clipped->left; x < clipped->right(); ++x) acc += grad.at(x, y);
        sum += acc / static_cast<double>(area(*clipped));
    }
    return texts == 0 ? 0.0 : sum / texts;
}

namespace {

void accumulate(std::optional<double>& mean, int& n, const std::optional<double>& v) {
    if (!v) return;
    if (!mean) mean = 0.0;
    *mean += *v;
    ++n;
}

std::string fmt4(const std::optional<double>& v) {
    if (!v) return "-";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", *v);
    return buf;
}

} // namespace

ScoreReport evaluate_corpus(const std::vector<Design>& designs,
                            const SaliencyProvider& saliency,
                            const BackgroundProvider& background,
                            const EligibilityPolicy& policy) {
    ScoreReport report;
    report.design_count = static_cast<int>(designs.size());
    report.per_design.resize(designs.size());

    const bool parallel = par::mode() == par::Mode::Parallel;
    auto score_one = [&](std::size_t i) {
        const Design& d = designs[i];
        DesignScores& s = report.per_design[i];
        s.design_id = d.id;
        s.element_count = static_cast<int>(d.elements.size());
        try {
            s.validity = score_validity(d, policy);
        } catch (const std::exception& e) {
            s.errors.push_back(e.what());
        }
        try {
            s.overlap = score_overlap(d, policy);
            s.alignment = score_alignment(d, policy);
            if (auto u = score_underlay(d, policy)) {
                s.underlay_loose = u->loose;
                s.underlay_strict = u->strict;
            }
            if (saliency) {
                const SaliencyMap map = saliency(d);
                s.utility = score_utility(d, map, policy);
                s.occlusion = score_occlusion(d, map, policy);
            }
            if (background) s.readability = score_readability(d, background(d), policy);
        } catch (const std::exception& e) {
            s.errors.push_back(e.what());
        }
    };

#ifdef DCOMP_HAVE_OPENMP
    if (parallel) {
#pragma omp parallel for schedule(dynamic)
        for (std::size_t i = 0; i < designs.size(); ++i) score_one(i);
    } else
#endif
    {
        for (std::size_t i = 0; i < designs.size(); ++i) score_one(i);
    }

    int n_val = 0, n_ove = 0, n_ali = 0, n_ul = 0, n_us = 0, n_uti = 0, n_occ = 0, n_rea = 0;
    for (const DesignScores& s : report.per_design) {
        accumulate(report.validity, n_val, s.validity);
        accumulate(report.overlap, n_ove, s.overlap);
        accumulate(report.alignment, n_ali, s.alignment);
        accumulate(report.underlay_loose, n_ul, s.underlay_loose);
        accumulate(report.underlay_strict, n_us, s.underlay_strict);
        accumulate(report.utility, n_uti, s.utility);
        accumulate(report.occlusion, n_occ, s.occlusion);
        accumulate(report.readability, n_rea, s.readability);
    }
    auto finish = [](std::optional<double>& mean, int n) {
        if (mean && n) *mean /= n;
    };
    finish(report.validity, n_val);
    finish(report.overlap, n_ove);
    finish(report.alignment, n_ali);
    finish(report.underlay_loose, n_ul);
    finish(report.underlay_strict, n_us);
    finish(report.utility, n_uti);
    finish(report.occlusion, n_occ);
    finish(report.readability, n_rea);
    return report;
}

std::string ScoreReport::to_table() const {
    std::ostringstream os;
    os << "designs    Val     Ove     Ali     Und_l   Und_s   Uti     Occ     Rea\n";
    char buf[16];
    std::snprintf(buf, sizeof buf, "%-10d", design_count);
    os << buf;
    for (const auto& v :
         {validity, overlap, alignment, underlay_loose, underlay_strict, utility, occlusion,
          readability}) {
        std::snprintf(buf, sizeof buf, "%-8s", fmt4(v).c_str());
        os << buf;
    }
    os << "\n";
    return os.str();
}

std::string ScoreReport::to_json() const {
    nlohmann::ordered_json j;
    j["design_count"] = design_count;
    auto put = [&](nlohmann::ordered_json& obj, const char* key,
                   const std::optional<double>& v) {
        if (v) obj[key] = *v;
        else obj[key] = nullptr;
    };
    nlohmann::ordered_json means;
    put(means, "validity", validity);
    put(means, "overlap", overlap);
    put(means, "alignment", alignment);
    put(means, "underlay_loose", underlay_loose);
    put(means, "underlay_strict", underlay_strict);
    put(means, "utility", utility);
    put(means, "occlusion", occlusion);
    put(means, "readability", readability);
    j["mean"] = means;
    j["designs"] = nlohmann::ordered_json::array();
    for (const DesignScores& s : per_design) {
        nlohmann::ordered_json row;
        row["id"] = s.design_id;
        row["elements"] = s.element_count;
        put(row, "validity", s.validity);
        put(row, "overlap", s.overlap);
        put(row, "alignment", s.alignment);
        put(row, "underlay_loose", s.underlay_loose);
        put(row, "underlay_strict", s.underlay_strict);
        put(row, "utility", s.utility);
        put(row, "occlusion", s.occlusion);
        put(row, "readability", s.readability);
        if (!s.errors.empty()) row["errors"] = s.errors;
        j["designs"].push_back(std::move(row));
    }
    return j.dump(2);
}

std::string ScoreReport::to_csv() const {
    std::ostringstream os;
    os << "id,elements,validity,overlap,alignment,underlay_loose,underlay_strict,utility,"
          "occlusion,readability\n";
    auto cell = [](const std::optional<double>& v) { return v ? std::to_string(*v) : ""; };
    for (const DesignScores& s : per_design) {
        os << s.design_id << "," << s.element_count << "," << cell(s.validity) << ","
           << cell(s.overlap) << "," << cell(s.alignment) << "," << cell(s.underlay_loose)
           << "," << cell(s.underlay_strict) << "," << cell(s.utility) << ","
           << cell(s.occlusion) << "," << cell(s.readability) << "\n";
    }
    os << "mean," << design_count << "," << cell(validity) << "," << cell(overlap) << ","
       << cell(alignment) << "," << cell(underlay_loose) << "," << cell(underlay_strict) << ","
       << cell(utility) << "," << cell(occlusion) << "," << cell(readability) << "\n";
    return os.str();
}

} // namespace dcomp
