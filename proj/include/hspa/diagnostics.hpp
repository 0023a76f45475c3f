#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace hspa {

/// Monte-Carlo means of softmax peakedness and soft-threshold support size
/// for i.i.d. N(0,1) score vectors, one entry per sequence length.
struct FlatnessProfile {
    std::vector<std::size_t> sequence_lengths;
    std::vector<double> mean_max_prob;
    std::vector<double> mean_entropy;
    std::vector<double> mean_support_size_st;
    std::size_t trials = 0;
    std::uint64_t seed = 0;
};

struct RowStatistics {
    double max_prob = 0.0;
    double entropy = 0.0;          // Shannon entropy of softmax(s), nats
    std::size_t support_st = 0;    // support size of the soft threshold of s
};

RowStatistics row_statistics(std::span<const double> s);

/// Trials are processed in blocks of kTrialBlock; block b of length index l
/// draws from stream (l << 32) | b. Block partials are summed in block order,
/// so the result does not depend on `threads`.
inline constexpr std::size_t kTrialBlock = 256;

FlatnessProfile flatness_profile(std::span<const std::size_t> lengths, std::size_t trials,
                                 std::uint64_t seed, unsigned threads = 1);

/// Both sides of P(T > k) <= P(s_(k) - s_(k+1) < 1/k), estimated empirically.
struct SupportBoundReport {
    std::size_t n = 0;
    std::vector<std::size_t> k_values;
    std::vector<double> p_support_gt_k;
    std::vector<double> p_gap_lt_inv_k;
    std::size_t trials = 0;

    double sigma(std::size_t i) const;
    /// p_support_gt_k <= p_gap_lt_inv_k + sigmas * binomial sigma of the right side.
    bool holds(std::size_t i, double sigmas = 3.0) const;
};

/// Event counts for one fixed (n, k_values); add() takes one score vector.
class SupportBoundTally {
public:
    explicit SupportBoundTally(std::vector<std::size_t> k_values);

    void add(std::span<const double> scores);
    void merge(const SupportBoundTally& other);

    std::size_t samples() const { return samples_; }
    const std::vector<std::size_t>& support_exceeds() const { return support_gt_; }
    const std::vector<std::size_t>& gap_below() const { return gap_lt_; }

private:
    std::vector<std::size_t> k_values_;
    std::vector<std::size_t> support_gt_;
    std::vector<std::size_t> gap_lt_;
    std::size_t samples_ = 0;
    std::vector<double> sorted_;
};

SupportBoundReport support_bound_check(std::size_t n, std::span<const std::size_t> k_values,
                                       std::size_t trials, std::uint64_t seed,
                                       unsigned threads = 1);

// CSV schemas (17 significant digits):
//   length,mean_max_prob,mean_entropy,mean_support_st
//   k,p_support_gt_k,p_gap_lt_inv_k
std::string to_csv(const FlatnessProfile& profile);
std::string to_csv(const SupportBoundReport& report);

/// Throws std::runtime_error naming the path on I/O failure.
void emit_csv(const FlatnessProfile& profile, const std::filesystem::path& path);
void emit_csv(const SupportBoundReport& report, const std::filesystem::path& path);

/// Writes text to path, throwing std::runtime_error with the path on failure.
void write_text_file(const std::filesystem::path& path, const std::string& text);

} // namespace hspa
