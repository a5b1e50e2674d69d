// dataset.hpp
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dcomp/font.hpp"
#include "dcomp/metrics.hpp"
#include "dcomp/model.hpp"
#include "dcomp/protocol.hpp"
#include "dcomp/renderer.hpp"

namespace dcomp {

struct DatasetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CorpusManifest {
    std::string split;
    int design_count = 0;
    std::map<int, int> element_count_histogram;
    std::vector<std::string> font_vocabulary;     // families referenced by the designs
    std::vector<std::pair<std::string, std::string>> filter_report;  // id -> reason
    // design id -> element id -> asset path (corpus-root relative)
    std::map<std::string, std::map<std::string, std::string>> asset_paths;
};

/// Corpus layout: <root>/designs/*.json (or the root itself), assets under
/// <root>, optional <root>/fonts.txt vocabulary and <root>/splits/<split>.txt
/// id lists. Designs must be fully planned and attributed; every design is
/// checked with validate_design.
std::pair<std::vector<Design>, CorpusManifest> load_corpus(const std::string& root,
                                                           const std::string& split = "");

/// Same schema without requiring roles or attributes; used by the planning
/// and composition commands.
struct ElementManifest {
    std::string id;
    Canvas canvas;
    std::vector<Element> elements;
    std::optional<LayerPlan> plan;                       // when roles were present
    std::map<std::string, ElementAttributes> attributes; // records present in the file
    std::map<std::string, std::string> asset_paths;      // element id -> image path
};
ElementManifest load_element_manifest(const std::string& json_path,
                                      const std::string& asset_root = "");

/// Serialize a design back to the corpus schema. Image elements reference
/// their asset path; rasters for elements without one are written under
/// <asset_dir>.
std::string design_to_json(const Design& d, const std::map<std::string, std::string>& asset_paths);
void save_design(const std::string& path, const Design& d,
                 const std::map<std::string, std::string>& asset_paths);

/// <= max stays, the rest drops; the partition is exact.
std::pair<std::vector<Design>, std::vector<Design>> filter_by_element_count(
    const std::vector<Design>& designs, int max_elements = 25);

struct CacheEntry {
    int level = 0;
    std::string file;
    std::uint64_t hash = 0;
};

struct CacheIndex {
    std::map<std::string, std::vector<CacheEntry>> designs;
    int renders_performed = 0;
    int cache_hits = 0;
};

/// Pre-render and cache the canvas states G1..G5 per design, keyed by a
/// content hash over canvas, plan and the attributes of layers <= i, so an
/// edit re-renders exactly the affected suffix. Idempotent; atomic writes;
/// parallelizes per design.
CacheIndex cache_states(const std::vector<Design>& designs, const FontStore& store,
                        const std::string& cache_dir, const RenderOptions& opts = {});

/// State-content hash used by the cache (exposed for tests).
std::uint64_t state_content_hash(const Design& d, int level);

/// Spectral-residual fallback provider for the content metrics.
SaliencyMap compute_saliency(const Raster& raster);

/// Loads <dir>/<design_id>.png as a saliency map (0-255 to [0,1]),
/// resampled to the canvas size when needed.
SaliencyMap load_saliency_map(const std::string& path, int canvas_w, int canvas_h);

} // namespace dcomp
