#pragma once

#include "hspa/matrix.hpp"
#include "hspa/simplex_ops.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace hspa {

enum class AttentionMode { hspa_exact, hspa_topk, nla, nla_random };

std::string_view to_string(AttentionMode mode);
/// Accepts the names printed by to_string; throws std::invalid_argument otherwise.
AttentionMode parse_attention_mode(std::string_view name);

inline constexpr std::size_t kDefaultRandomSubset = 512;

struct AttentionConfig {
    AttentionMode mode = AttentionMode::hspa_topk;
    std::size_t k = kDefaultTopK;          // top-k width for hspa_topk
    std::size_t m = kDefaultRandomSubset;  // subset size for nla_random
    std::uint64_t seed = 0;
    double temperature = 1.0;              // similarities are divided by this

    void validate() const;
};

/// H x W x C grid stored row-major; position (y, x) is feature y*W + x.
class FeatureMap {
public:
    FeatureMap(std::size_t height, std::size_t width, std::size_t channels);
    FeatureMap(std::size_t height, std::size_t width, std::size_t channels, std::vector<double> data);

    std::size_t height() const { return height_; }
    std::size_t width() const { return width_; }
    std::size_t channels() const { return channels_; }
    std::size_t positions() const { return height_ * width_; }

    std::span<const double> feature(std::size_t index) const;
    std::span<double> feature(std::size_t index);
    std::span<const double> data() const { return data_; }

private:
    std::size_t height_;
    std::size_t width_;
    std::size_t channels_;
    std::vector<double> data_;
};

enum class MapRole { query, key, value };

/// Stand-in for a learned 1x1 convolution: y = M x with M of shape C_out x C_in.
struct LinearMap {
    Matrix matrix;
    MapRole role = MapRole::query;

    std::size_t input_channels() const { return matrix.cols(); }
    std::size_t output_channels() const { return matrix.rows(); }
    std::vector<double> apply(std::span<const double> x) const;

    static LinearMap identity(std::size_t channels, MapRole role);
    /// Square orthogonal matrix from Gram-Schmidt on a seeded Gaussian draw.
    static LinearMap random_orthogonal(std::size_t channels, std::uint64_t seed, MapRole role);
};

struct ProjectionMaps {
    LinearMap query;
    LinearMap key;
    LinearMap value;

    static ProjectionMaps identity(std::size_t channels);
};

/// Non-zero attention weights of one query, ascending by index.
struct RowWeights {
    std::vector<std::size_t> index;
    std::vector<double> weight;

    std::size_t nonzero() const { return index.size(); }
};

/// Distinct indices from [0, n), partial Fisher-Yates driven by rng, returned
/// in ascending order. Returns every index when m >= n.
std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t m,
                                                    std::uint64_t seed, std::uint64_t stream);

/// Turns one row of similarities into attention weights according to cfg.mode.
/// `stream` selects the random stream used by nla_random.
RowWeights weight_row(std::span<const double> similarities, const AttentionConfig& cfg,
                      std::uint64_t stream);

/// s_j = phi_q(x_i)^T phi_k(x_j), no scaling.
std::vector<double> similarity_row(std::size_t query_index, const FeatureMap& fmap,
                                   const LinearMap& phi_q, const LinearMap& phi_k);

RowWeights attention_weights(std::size_t query_index, const FeatureMap& fmap,
                             const ProjectionMaps& maps, const AttentionConfig& cfg);

/// Sum_j ST_j(s) phi_v(x_j); exact or top-k soft thresholding per cfg.mode.
std::vector<double> hspa_fuse(std::size_t query_index, const FeatureMap& fmap,
                              const ProjectionMaps& maps, const AttentionConfig& cfg);
/// Softmax-weighted fusion over all N positions.
std::vector<double> nla_fuse(std::size_t query_index, const FeatureMap& fmap,
                             const ProjectionMaps& maps, const AttentionConfig& cfg);
/// Softmax over a seeded random subset of min(m, N) positions.
std::vector<double> nla_random_fuse(std::size_t query_index, const FeatureMap& fmap,
                                    const ProjectionMaps& maps, const AttentionConfig& cfg);

/// Fused response at every position, rows computed independently in parallel.
FeatureMap attend_full(const FeatureMap& fmap, const ProjectionMaps& maps,
                       const AttentionConfig& cfg, unsigned threads = 1);

} // namespace hspa
