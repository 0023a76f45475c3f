#include "hspa/attention.hpp"

#include "hspa/parallel.hpp"
#include "hspa/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace hspa {

std::string_view to_string(AttentionMode mode)
{
    switch (mode) {
    case AttentionMode::hspa_exact: return "hspa_exact";
    case AttentionMode::hspa_topk: return "hspa_topk";
    case AttentionMode::nla: return "nla";
    case AttentionMode::nla_random: return "nla_random";
    }
    return "unknown";
}

AttentionMode parse_attention_mode(std::string_view name)
{
    for (const auto mode : {AttentionMode::hspa_exact, AttentionMode::hspa_topk, AttentionMode::nla,
                            AttentionMode::nla_random}) {
        if (name == to_string(mode)) {
            return mode;
        }
    }
    throw std::invalid_argument("unknown attention mode '" + std::string(name) +
                                "' (expected hspa_exact, hspa_topk, nla or nla_random)");
}

void AttentionConfig::validate() const
{
    if (k == 0) {
        throw std::invalid_argument("AttentionConfig: k must be >= 1");
    }
    if (m == 0) {
        throw std::invalid_argument("AttentionConfig: m must be >= 1");
    }
    if (!(temperature > 0.0) || !std::isfinite(temperature)) {
        throw std::invalid_argument("AttentionConfig: temperature must be positive and finite");
    }
}

FeatureMap::FeatureMap(std::size_t height, std::size_t width, std::size_t channels)
    : FeatureMap(height, width, channels, std::vector<double>(height * width * channels, 0.0))
{
}

FeatureMap::FeatureMap(std::size_t height, std::size_t width, std::size_t channels,
                       std::vector<double> data)
    : height_(height), width_(width), channels_(channels), data_(std::move(data))
{
    if (height_ == 0 || width_ == 0 || channels_ == 0) {
        throw std::invalid_argument("FeatureMap: H, W and C must be >= 1");
    }
    if (data_.size() != height_ * width_ * channels_) {
        throw std::invalid_argument("FeatureMap: data length " + std::to_string(data_.size()) +
                                    " != H*W*C = " +
                                    std::to_string(height_ * width_ * channels_));
    }
    for (const double v : data_) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("FeatureMap: non-finite entry");
        }
    }
}

std::span<const double> FeatureMap::feature(std::size_t index) const
{
    return {data_.data() + index * channels_, channels_};
}

std::span<double> FeatureMap::feature(std::size_t index)
{
    return {data_.data() + index * channels_, channels_};
}

std::vector<double> LinearMap::apply(std::span<const double> x) const
{
    return matrix.multiply(x);
}

LinearMap LinearMap::identity(std::size_t channels, MapRole role)
{
    return {Matrix::identity(channels), role};
}

LinearMap LinearMap::random_orthogonal(std::size_t channels, std::uint64_t seed, MapRole role)
{
    Rng rng(seed, static_cast<std::uint64_t>(role));
    Matrix m(channels, channels);
    for (std::size_t r = 0; r < channels; ++r) {
        for (;;) {
            for (std::size_t c = 0; c < channels; ++c) {
                m(r, c) = rng.normal();
            }
            // Modified Gram-Schmidt against the previous rows.
            for (std::size_t p = 0; p < r; ++p) {
                double dot = 0.0;
                for (std::size_t c = 0; c < channels; ++c) {
                    dot += m(r, c) * m(p, c);
                }
                for (std::size_t c = 0; c < channels; ++c) {
                    m(r, c) -= dot * m(p, c);
                }
            }
            double norm = 0.0;
            for (std::size_t c = 0; c < channels; ++c) {
                norm += m(r, c) * m(r, c);
            }
            norm = std::sqrt(norm);
            if (norm > 1e-8) {
                for (std::size_t c = 0; c < channels; ++c) {
                    m(r, c) /= norm;
                }
                break;
            }
        }
    }
    return {std::move(m), role};
}

ProjectionMaps ProjectionMaps::identity(std::size_t channels)
{
    return {LinearMap::identity(channels, MapRole::query), LinearMap::identity(channels, MapRole::key),
            LinearMap::identity(channels, MapRole::value)};
}

std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t m,
                                                    std::uint64_t seed, std::uint64_t stream)
{
    std::vector<std::size_t> pool(n);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    if (m >= n) {
        return pool;
    }
    Rng rng(seed, stream);
    for (std::size_t t = 0; t < m; ++t) {
        const std::size_t pick = t + static_cast<std::size_t>(rng.bounded(n - t));
        std::swap(pool[t], pool[pick]);
    }
    pool.resize(m);
    std::sort(pool.begin(), pool.end());
    return pool;
}

RowWeights weight_row(std::span<const double> similarities, const AttentionConfig& cfg,
                      std::uint64_t stream)
{
    cfg.validate();
    std::vector<double> scaled;
    std::span<const double> s = similarities;
    if (cfg.temperature != 1.0) {
        scaled.assign(similarities.begin(), similarities.end());
        for (double& v : scaled) {
            v /= cfg.temperature;
        }
        s = scaled;
    }

    RowWeights row;
    switch (cfg.mode) {
    case AttentionMode::hspa_exact:
    case AttentionMode::hspa_topk: {
        const SparseWeights st = cfg.mode == AttentionMode::hspa_exact
                                     ? soft_threshold_exact(s)
                                     : soft_threshold_topk(s, cfg.k);
        row.index = st.support;
        row.weight.reserve(st.support.size());
        for (const std::size_t j : st.support) {
            row.weight.push_back(st.weights[j]);
        }
        break;
    }
    case AttentionMode::nla:
        row.index.resize(s.size());
        std::iota(row.index.begin(), row.index.end(), std::size_t{0});
        row.weight = softmax(s);
        break;
    case AttentionMode::nla_random: {
        require_similarity_vector(s, "weight_row");
        row.index = sample_without_replacement(s.size(), cfg.m, cfg.seed, stream);
        std::vector<double> subset(row.index.size());
        for (std::size_t i = 0; i < row.index.size(); ++i) {
            subset[i] = s[row.index[i]];
        }
        row.weight = softmax(subset);
        break;
    }
    }
    return row;
}

namespace {

void check_maps(const FeatureMap& fmap, const ProjectionMaps& maps)
{
    const std::size_t c = fmap.channels();
    if (maps.query.input_channels() != c || maps.key.input_channels() != c ||
        maps.value.input_channels() != c) {
        throw std::invalid_argument("projection maps do not accept " + std::to_string(c) +
                                    " input channels");
    }
    if (maps.query.output_channels() != maps.key.output_channels()) {
        throw std::invalid_argument("query and key maps must have the same output width");
    }
}

void check_index(std::size_t query_index, const FeatureMap& fmap)
{
    if (query_index >= fmap.positions()) {
        throw std::out_of_range("query index " + std::to_string(query_index) +
                                " out of range for " + std::to_string(fmap.positions()) +
                                " positions");
    }
}

// phi applied to every position, row-major N x C_out.
Matrix project_all(const FeatureMap& fmap, const LinearMap& phi)
{
    Matrix out(fmap.positions(), phi.output_channels());
    for (std::size_t j = 0; j < fmap.positions(); ++j) {
        const std::vector<double> y = phi.apply(fmap.feature(j));
        std::copy(y.begin(), y.end(), &out(j, 0));
    }
    return out;
}

std::vector<double> similarities_against(std::span<const double> query, const Matrix& keys)
{
    std::vector<double> s(keys.rows());
    for (std::size_t j = 0; j < keys.rows(); ++j) {
        const auto key = keys.row(j);
        double acc = 0.0;
        for (std::size_t c = 0; c < key.size(); ++c) {
            acc += query[c] * key[c];
        }
        s[j] = acc;
    }
    return s;
}

std::vector<double> weighted_sum(const RowWeights& row, const Matrix& values)
{
    std::vector<double> out(values.cols(), 0.0);
    for (std::size_t i = 0; i < row.index.size(); ++i) {
        const auto v = values.row(row.index[i]);
        for (std::size_t c = 0; c < out.size(); ++c) {
            out[c] += row.weight[i] * v[c];
        }
    }
    return out;
}

std::vector<double> fuse_with(std::size_t query_index, const FeatureMap& fmap,
                              const ProjectionMaps& maps, const AttentionConfig& cfg)
{
    check_index(query_index, fmap);
    check_maps(fmap, maps);
    const std::vector<double> q = maps.query.apply(fmap.feature(query_index));
    const Matrix keys = project_all(fmap, maps.key);
    const RowWeights row = weight_row(similarities_against(q, keys), cfg, query_index);
    return weighted_sum(row, project_all(fmap, maps.value));
}

} // namespace

std::vector<double> similarity_row(std::size_t query_index, const FeatureMap& fmap,
                                   const LinearMap& phi_q, const LinearMap& phi_k)
{
    check_index(query_index, fmap);
    if (phi_q.input_channels() != fmap.channels() || phi_k.input_channels() != fmap.channels()) {
        throw std::invalid_argument("similarity_row: map input width does not match feature channels");
    }
    if (phi_q.output_channels() != phi_k.output_channels()) {
        throw std::invalid_argument("similarity_row: query and key maps must have the same output width");
    }
    const std::vector<double> q = phi_q.apply(fmap.feature(query_index));
    return similarities_against(q, project_all(fmap, phi_k));
}

RowWeights attention_weights(std::size_t query_index, const FeatureMap& fmap,
                             const ProjectionMaps& maps, const AttentionConfig& cfg)
{
    check_maps(fmap, maps);
    return weight_row(similarity_row(query_index, fmap, maps.query, maps.key), cfg, query_index);
}

std::vector<double> hspa_fuse(std::size_t query_index, const FeatureMap& fmap,
                              const ProjectionMaps& maps, const AttentionConfig& cfg)
{
    if (cfg.mode != AttentionMode::hspa_exact && cfg.mode != AttentionMode::hspa_topk) {
        throw std::invalid_argument("hspa_fuse: mode must be hspa_exact or hspa_topk");
    }
    return fuse_with(query_index, fmap, maps, cfg);
}

std::vector<double> nla_fuse(std::size_t query_index, const FeatureMap& fmap,
                             const ProjectionMaps& maps, const AttentionConfig& cfg)
{
    AttentionConfig softmax_cfg = cfg;
    softmax_cfg.mode = AttentionMode::nla;
    return fuse_with(query_index, fmap, maps, softmax_cfg);
}

std::vector<double> nla_random_fuse(std::size_t query_index, const FeatureMap& fmap,
                                    const ProjectionMaps& maps, const AttentionConfig& cfg)
{
    AttentionConfig random_cfg = cfg;
    random_cfg.mode = AttentionMode::nla_random;
    return fuse_with(query_index, fmap, maps, random_cfg);
}

FeatureMap attend_full(const FeatureMap& fmap, const ProjectionMaps& maps,
                       const AttentionConfig& cfg, unsigned threads)
{
    check_maps(fmap, maps);
    cfg.validate();
    const Matrix queries = project_all(fmap, maps.query);
    const Matrix keys = project_all(fmap, maps.key);
    const Matrix values = project_all(fmap, maps.value);
    FeatureMap out(fmap.height(), fmap.width(), values.cols());

    parallel_for(fmap.positions(), threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const RowWeights row = weight_row(similarities_against(queries.row(i), keys), cfg, i);
            const std::vector<double> fused = weighted_sum(row, values);
            std::copy(fused.begin(), fused.end(), out.feature(i).begin());
        }
    });
    return out;
}

} // namespace hspa
