#include "hspa/simplex_ops.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>

namespace hspa {

namespace {

// Neumaier summation; the running value is sum + compensation.
struct CompensatedSum {
    double sum = 0.0;
    double compensation = 0.0;

    void add(double x)
    {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x)) {
            compensation += (sum - t) + x;
        } else {
            compensation += (x - t) + sum;
        }
        sum = t;
    }

    double value() const { return sum + compensation; }
};

// Weights are formed on values shifted by `peak` (the largest entry), which
// leaves the projection unchanged and keeps s_j - threshold well conditioned
// for inputs of large magnitude.
SparseWeights apply_threshold(std::span<const double> s, std::span<const std::size_t> candidates,
                              double peak, double shifted_threshold)
{
    SparseWeights out;
    out.weights.assign(s.size(), 0.0);
    out.threshold = shifted_threshold + peak;
    for (const std::size_t j : candidates) {
        const double w = (s[j] - peak) - shifted_threshold;
        if (w > 0.0) {
            out.weights[j] = w;
        }
    }
    for (std::size_t j = 0; j < s.size(); ++j) {
        if (out.weights[j] > 0.0) {
            out.support.push_back(j);
        }
    }
    out.support_size = out.support.size();
    return out;
}

void require_context(const JacobianContext& ctx, std::size_t n, const char* where)
{
    if (ctx.size() != n) {
        throw std::invalid_argument(std::string(where) + ": dimension mismatch (context has " +
                                    std::to_string(ctx.size()) + ", vector has " +
                                    std::to_string(n) + ")");
    }
    if (ctx.support.empty()) {
        throw std::invalid_argument(std::string(where) + ": empty support");
    }
}

} // namespace

void require_similarity_vector(std::span<const double> s, const char* where)
{
    if (s.empty()) {
        throw std::invalid_argument(std::string(where) + ": empty input");
    }
    for (std::size_t j = 0; j < s.size(); ++j) {
        if (!std::isfinite(s[j])) {
            throw std::invalid_argument(std::string(where) + ": non-finite entry at index " +
                                        std::to_string(j));
        }
    }
}

JacobianContext JacobianContext::from_characteristic(std::vector<std::uint8_t> c)
{
    JacobianContext ctx;
    for (std::size_t j = 0; j < c.size(); ++j) {
        if (c[j] > 1) {
            throw std::invalid_argument("JacobianContext: characteristic entries must be 0 or 1");
        }
        if (c[j] == 1) {
            ctx.support.push_back(j);
        }
    }
    if (ctx.support.empty()) {
        throw std::invalid_argument("JacobianContext: support must be non-empty");
    }
    ctx.characteristic = std::move(c);
    return ctx;
}

JacobianContext SparseWeights::jacobian() const
{
    JacobianContext ctx;
    ctx.characteristic.assign(weights.size(), 0);
    for (const std::size_t j : support) {
        ctx.characteristic[j] = 1;
    }
    ctx.support = support;
    return ctx;
}

ThresholdResult threshold_from_sorted(std::span<const double> sorted_desc)
{
    if (sorted_desc.empty()) {
        throw std::invalid_argument("threshold_from_sorted: empty input");
    }
    CompensatedSum prefix;
    CompensatedSum support_sum;
    std::size_t support = 0;
    for (std::size_t k = 1; k <= sorted_desc.size(); ++k) {
        const double v = sorted_desc[k - 1];
        prefix.add(v);
        if (static_cast<double>(k) * v + 1.0 > prefix.value()) {
            support = k;
            support_sum = prefix;
        } else {
            // The condition is monotone in k for sorted input.
            break;
        }
    }
    // k = 1 always satisfies the condition, so support >= 1.
    return {(support_sum.value() - 1.0) / static_cast<double>(support), support};
}

SparseWeights soft_threshold_exact(std::span<const double> s)
{
    require_similarity_vector(s, "soft_threshold_exact");
    const double peak = *std::max_element(s.begin(), s.end());
    std::vector<double> sorted(s.size());
    for (std::size_t j = 0; j < s.size(); ++j) {
        sorted[j] = s[j] - peak;
    }
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    const ThresholdResult t = threshold_from_sorted(sorted);

    std::vector<std::size_t> all(s.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    return apply_threshold(s, all, peak, t.threshold);
}

std::vector<std::size_t> top_k_indices(std::span<const double> s, std::size_t k)
{
    if (k == 0) {
        throw std::invalid_argument("top_k_indices: k must be >= 1");
    }
    const auto by_rank = [&s](std::size_t a, std::size_t b) {
        return s[a] > s[b] || (s[a] == s[b] && a < b);
    };
    std::vector<std::size_t> picked;
    if (k >= s.size()) {
        picked.resize(s.size());
        std::iota(picked.begin(), picked.end(), std::size_t{0});
    } else {
        std::vector<double> scratch(s.begin(), s.end());
        const auto kth = scratch.begin() + static_cast<std::ptrdiff_t>(k - 1);
        std::nth_element(scratch.begin(), kth, scratch.end(), std::greater<>());
        const double pivot = *kth;
        picked.reserve(k);
        for (std::size_t j = 0; j < s.size(); ++j) {
            if (s[j] > pivot) {
                picked.push_back(j);
            }
        }
        // Ties with the pivot are admitted lowest index first.
        for (std::size_t j = 0; j < s.size() && picked.size() < k; ++j) {
            if (s[j] == pivot) {
                picked.push_back(j);
            }
        }
    }
    std::sort(picked.begin(), picked.end(), by_rank);
    return picked;
}

SparseWeights soft_threshold_topk(std::span<const double> s, std::size_t k)
{
    if (k == 0) {
        throw std::invalid_argument("soft_threshold_topk: k must be >= 1");
    }
    require_similarity_vector(s, "soft_threshold_topk");
    const std::vector<std::size_t> picked = top_k_indices(s, k);
    const double peak = s[picked.front()];
    std::vector<double> sorted(picked.size());
    for (std::size_t i = 0; i < picked.size(); ++i) {
        sorted[i] = s[picked[i]] - peak;
    }
    const ThresholdResult t = threshold_from_sorted(sorted);
    return apply_threshold(s, picked, peak, t.threshold);
}

std::vector<double> softmax(std::span<const double> s)
{
    require_similarity_vector(s, "softmax");
    const double peak = *std::max_element(s.begin(), s.end());
    std::vector<double> out(s.size());
    double total = 0.0;
    for (std::size_t j = 0; j < s.size(); ++j) {
        out[j] = std::exp(s[j] - peak);
        total += out[j];
    }
    for (double& v : out) {
        v /= total;
    }
    return out;
}

std::vector<double> jvp_on_support(const JacobianContext& ctx, std::span<const double> r)
{
    require_context(ctx, r.size(), "jvp");
    double dot = 0.0;
    for (const std::size_t j : ctx.support) {
        dot += r[j];
    }
    const double mean = dot / static_cast<double>(ctx.support_size());
    std::vector<double> out(ctx.support_size());
    for (std::size_t i = 0; i < ctx.support_size(); ++i) {
        out[i] = r[ctx.support[i]] - mean;
    }
    return out;
}

std::vector<double> jvp(const JacobianContext& ctx, std::span<const double> r)
{
    const std::vector<double> on_support = jvp_on_support(ctx, r);
    std::vector<double> out(r.size(), 0.0);
    for (std::size_t i = 0; i < on_support.size(); ++i) {
        out[ctx.support[i]] = on_support[i];
    }
    return out;
}

Matrix jacobian_dense(const JacobianContext& ctx)
{
    const std::size_t n = ctx.size();
    if (n > kMaxDenseJacobian) {
        throw std::invalid_argument("jacobian_dense: N = " + std::to_string(n) +
                                    " exceeds the dense limit of " +
                                    std::to_string(kMaxDenseJacobian));
    }
    require_context(ctx, n, "jacobian_dense");
    const double inv_t = 1.0 / static_cast<double>(ctx.support_size());
    Matrix jac(n, n);
    for (const std::size_t a : ctx.support) {
        for (const std::size_t b : ctx.support) {
            jac(a, b) = (a == b ? 1.0 : 0.0) - inv_t;
        }
    }
    return jac;
}

} // namespace hspa
