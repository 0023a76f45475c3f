#pragma once

#include "hspa/attention.hpp"
#include "hspa/image.hpp"

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace hspa {

enum class SearchKind { full, window };

struct SearchSpace {
    SearchKind kind = SearchKind::window;
    std::size_t window = 31;

    /// "full" or "window:<w>".
    static SearchSpace parse(std::string_view text);
    std::string to_string() const;
};

/// How two patch features are compared.
///  - distance: s_j = -|p_i - p_j|^2 / (2 d h^2), d = patch size. Up to a
///    per-query constant this is the dot product of the query patch with a key
///    patch augmented by -|p_j|^2 / 2, and both soft thresholding and softmax
///    ignore per-query constants.
///  - dot: raw p_i . p_j.
enum class PatchSimilarity { distance, dot };

std::string_view to_string(PatchSimilarity similarity);
PatchSimilarity parse_patch_similarity(std::string_view name);

struct PatchConfig {
    std::size_t patch_radius = 2;   // feature window is (2r + 1)^2
    std::size_t stride = 1;         // candidate grid spacing inside the search region
    SearchSpace search{};
    std::size_t scale = 2;
    AttentionConfig mode{};
    PatchSimilarity similarity = PatchSimilarity::distance;
    double bandwidth = 0.1;         // h for PatchSimilarity::distance

    void validate() const;
};

struct ReconstructionResult {
    Image image;
    double mean_support_size = 0.0;   // mean count of strictly positive weights per pixel
    double mean_candidates = 0.0;     // mean search-space size per pixel
};

/// Candidate pixel indices (row-major) searched for query (x, y), ascending.
std::vector<std::size_t> search_candidates(std::size_t width, std::size_t height, std::size_t x,
                                           std::size_t y, const PatchConfig& cfg);

/// Similarities of query (x, y) against `candidates`, patches taken from
/// `estimate` with reflect padding.
std::vector<double> patch_similarities(const Image& estimate, std::size_t x, std::size_t y,
                                       const std::vector<std::size_t>& candidates,
                                       const PatchConfig& cfg);

/// Non-local refinement of an already upsampled estimate: every output pixel
/// is the attention-weighted average of candidate centre values.
ReconstructionResult refine_estimate(const Image& estimate, const PatchConfig& cfg,
                                     unsigned threads = 1);

/// Bicubic upsampling by cfg.scale followed by refine_estimate.
ReconstructionResult reconstruct(const Image& lr, const PatchConfig& cfg, unsigned threads = 1);

} // namespace hspa
