// metrics.hpp
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dcomp/model.hpp"
#include "dcomp/raster.hpp"

namespace dcomp {

struct MetricsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Canvas-sized single-channel importance map in [0,1].
using SaliencyMap = FloatPlane;

/// Element-eligibility knobs, kept in one place so calibration never has
/// to touch the formulas. Backgrounds never score; underlays are excluded
/// from overlap and alignment but are the subjects of the underlay metrics.
struct EligibilityPolicy {
    double validity_min_area_fraction = 0.001;  // on-canvas area >= 0.1% of canvas
    double saliency_threshold = 0.5;            // "non-salient" cutoff for utility
    double alignment_epsilon = 1e-6;            // clamp for -log(1-d)
};

/// Fraction of scorable (non-background) elements whose canvas-clipped area
/// reaches the validity threshold. Throws MetricsError when the design has
/// no scorable elements.
double score_validity(const Design& d, const EligibilityPolicy& policy = {});

/// Mean over unordered pairs of valid non-underlay elements of
/// area(a∩b) / min(area(a), area(b)); 0 with fewer than 2 eligible.
double score_overlap(const Design& d, const EligibilityPolicy& policy = {});

/// Mean over eligible elements of -log(1 - d), d the smallest normalized
/// distance to any other eligible element along the six alignment axes.
double score_alignment(const Design& d, const EligibilityPolicy& policy = {});

struct UnderlayScores {
    double loose = 0;   // mean over underlays of max covered fraction
    double strict = 0;  // mean over underlays of full-containment indicator
};

/// Absent when the design has no underlays (excluded from corpus means).
std::optional<UnderlayScores> score_underlay(const Design& d,
                                             const EligibilityPolicy& policy = {});

/// Fraction of the non-salient canvas covered by scorable elements.
/// Throws MetricsError when no pixel is below the saliency threshold.
double score_utility(const Design& d, const SaliencyMap& saliency,
                     const EligibilityPolicy& policy = {});

/// Mean saliency under the union of scorable element boxes; 0 when empty.
double score_occlusion(const Design& d, const SaliencyMap& saliency,
                       const EligibilityPolicy& policy = {});

/// Mean gradient magnitude of the background render inside text boxes,
/// averaged over text elements; 0 without text.
double score_readability(const Design& d, const Raster& background_raster,
                         const EligibilityPolicy& policy = {});

struct DesignScores {
    std::string design_id;
    int element_count = 0;
    std::optional<double> validity, overlap, alignment;
    std::optional<double> underlay_loose, underlay_strict;
    std::optional<double> utility, occlusion, readability;
    std::vector<std::string> errors;
};

struct ScoreReport {
    std::vector<DesignScores> per_design;
    int design_count = 0;
    std::optional<double> validity, overlap, alignment;
    std::optional<double> underlay_loose, underlay_strict;
    std::optional<double> utility, occlusion, readability;

    std::string to_table() const;  // aligned columns, one row per corpus
    std::string to_json() const;
    std::string to_csv() const;
};

/// Saliency and background providers for the content metrics; when absent,
/// the content columns stay empty.
using SaliencyProvider = std::function<SaliencyMap(const Design&)>;
using BackgroundProvider = std::function<Raster(const Design&)>;

/// Per-design scores plus corpus means. Designs lacking underlays are
/// excluded from the underlay means only; per-design errors are collected,
/// not fatal. Parallelizes per design with a deterministic aggregation
/// order.
ScoreReport evaluate_corpus(const std::vector<Design>& designs,
                            const SaliencyProvider& saliency = {},
                            const BackgroundProvider& background = {},
                            const EligibilityPolicy& policy = {});

} // namespace dcomp
