#pragma once

#include "hspa/matrix.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace hspa {

inline constexpr std::size_t kDefaultTopK = 128;
inline constexpr std::size_t kMaxDenseJacobian = 4096;

/// Support bookkeeping needed for the backward pass of soft thresholding.
///
/// The Jacobian of the projection is Diag(c) - c c^T / T where c is the 0/1
/// indicator of the support and T its size. `support` holds the same
/// information as an ascending index list so products cost O(T).
struct JacobianContext {
    std::vector<std::uint8_t> characteristic;
    std::vector<std::size_t> support;

    std::size_t size() const { return characteristic.size(); }
    std::size_t support_size() const { return support.size(); }

    /// Throws std::invalid_argument unless every entry is 0/1 and at least one is set.
    static JacobianContext from_characteristic(std::vector<std::uint8_t> c);
};

/// Output of soft thresholding: weights[j] = max(s[j] - threshold, 0).
struct SparseWeights {
    std::vector<double> weights;
    std::vector<std::size_t> support; // ascending indices with weights[j] > 0
    std::size_t support_size = 0;
    double threshold = 0.0;

    JacobianContext jacobian() const;
};

struct ThresholdResult {
    double threshold = 0.0;
    std::size_t support_size = 0;
};

/// Threshold for values already sorted in non-increasing order. Scans the
/// prefix while k*s_(k) + 1 > sum_{j<=k} s_(j) holds, using compensated
/// prefix sums. If every entry passes, support_size == sorted.size().
ThresholdResult threshold_from_sorted(std::span<const double> sorted_desc);

/// Euclidean projection of s onto the probability simplex via a full sort.
SparseWeights soft_threshold_exact(std::span<const double> s);

/// Soft thresholding restricted to the k largest entries of s; the rest are
/// forced to zero. Equal values are ranked by lower index first. Identical to
/// soft_threshold_exact whenever k is at least the exact support size.
SparseWeights soft_threshold_topk(std::span<const double> s, std::size_t k);

/// Indices of the k largest entries, ordered by (value desc, index asc).
std::vector<std::size_t> top_k_indices(std::span<const double> s, std::size_t k);

std::vector<double> softmax(std::span<const double> s);

/// J(s) r = c ⊙ (r - (c^T r / T) 1), written as a dense length-N vector.
std::vector<double> jvp(const JacobianContext& ctx, std::span<const double> r);

/// Same product restricted to the support: result[i] belongs to index
/// ctx.support[i]. O(T) work, independent of N.
std::vector<double> jvp_on_support(const JacobianContext& ctx, std::span<const double> r);

/// Dense Diag(c) - c c^T / T. Test-scale only (N <= kMaxDenseJacobian).
Matrix jacobian_dense(const JacobianContext& ctx);

/// Throws std::invalid_argument if s is empty or holds NaN/Inf.
void require_similarity_vector(std::span<const double> s, const char* where);

} // namespace hspa
