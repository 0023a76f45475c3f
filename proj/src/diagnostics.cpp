#include "hspa/diagnostics.hpp"

#include "hspa/parallel.hpp"
#include "hspa/rng.hpp"
#include "hspa/simplex_ops.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace hspa {

RowStatistics row_statistics(std::span<const double> s)
{
    const std::vector<double> p = softmax(s);
    RowStatistics st;
    for (const double v : p) {
        st.max_prob = std::max(st.max_prob, v);
        if (v > 0.0) {
            st.entropy -= v * std::log(v);
        }
    }
    st.support_st = soft_threshold_exact(s).support_size;
    return st;
}

namespace {

std::size_t block_count(std::size_t trials)
{
    return (trials + kTrialBlock - 1) / kTrialBlock;
}

std::uint64_t block_stream(std::size_t group, std::size_t block)
{
    return (static_cast<std::uint64_t>(group) << 32) | static_cast<std::uint64_t>(block);
}

} // namespace

FlatnessProfile flatness_profile(std::span<const std::size_t> lengths, std::size_t trials,
                                 std::uint64_t seed, unsigned threads)
{
    if (lengths.empty()) {
        throw std::invalid_argument("flatness_profile: lengths must be non-empty");
    }
    if (trials < 1) {
        throw std::invalid_argument("flatness_profile: trials must be >= 1");
    }
    for (const std::size_t n : lengths) {
        if (n < 2) {
            throw std::invalid_argument("flatness_profile: every length must be >= 2");
        }
    }

    FlatnessProfile profile;
    profile.sequence_lengths.assign(lengths.begin(), lengths.end());
    profile.trials = trials;
    profile.seed = seed;

    const std::size_t blocks = block_count(trials);
    struct Partial {
        double max_prob = 0.0;
        double entropy = 0.0;
        double support = 0.0;
    };
    for (std::size_t l = 0; l < lengths.size(); ++l) {
        const std::size_t n = lengths[l];
        std::vector<Partial> partial(blocks);
        parallel_for(blocks, threads, [&](std::size_t bb, std::size_t be) {
            std::vector<double> s(n);
            for (std::size_t b = bb; b < be; ++b) {
                Rng rng(seed, block_stream(l, b));
                const std::size_t end = std::min(trials, (b + 1) * kTrialBlock);
                for (std::size_t t = b * kTrialBlock; t < end; ++t) {
                    for (auto& v : s) {
                        v = rng.normal();
                    }
                    const RowStatistics st = row_statistics(s);
                    partial[b].max_prob += st.max_prob;
                    partial[b].entropy += st.entropy;
                    partial[b].support += static_cast<double>(st.support_st);
                }
            }
        });
        Partial total;
        for (const auto& p : partial) {
            total.max_prob += p.max_prob;
            total.entropy += p.entropy;
            total.support += p.support;
        }
        const auto denom = static_cast<double>(trials);
        profile.mean_max_prob.push_back(total.max_prob / denom);
        profile.mean_entropy.push_back(total.entropy / denom);
        profile.mean_support_size_st.push_back(total.support / denom);
    }
    return profile;
}

double SupportBoundReport::sigma(std::size_t i) const
{
    const double p = p_gap_lt_inv_k.at(i);
    return std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
}

bool SupportBoundReport::holds(std::size_t i, double sigmas) const
{
    return p_support_gt_k.at(i) <= p_gap_lt_inv_k.at(i) + sigmas * sigma(i);
}

SupportBoundTally::SupportBoundTally(std::vector<std::size_t> k_values)
    : k_values_(std::move(k_values)),
      support_gt_(k_values_.size(), 0),
      gap_lt_(k_values_.size(), 0)
{
    for (const std::size_t k : k_values_) {
        if (k == 0) {
            throw std::invalid_argument("SupportBoundTally: k must be >= 1");
        }
    }
}

void SupportBoundTally::add(std::span<const double> scores)
{
    sorted_.assign(scores.begin(), scores.end());
    std::sort(sorted_.begin(), sorted_.end(), std::greater<>());
    const std::size_t support = threshold_from_sorted(sorted_).support_size;
    for (std::size_t i = 0; i < k_values_.size(); ++i) {
        const std::size_t k = k_values_[i];
        if (k >= sorted_.size()) {
            throw std::invalid_argument("SupportBoundTally: k must be < n");
        }
        if (support > k) {
            ++support_gt_[i];
        }
        // Order statistics are 1-based: s_(k) is sorted_[k - 1].
        if (sorted_[k - 1] - sorted_[k] < 1.0 / static_cast<double>(k)) {
            ++gap_lt_[i];
        }
    }
    ++samples_;
}

void SupportBoundTally::merge(const SupportBoundTally& other)
{
    for (std::size_t i = 0; i < k_values_.size(); ++i) {
        support_gt_[i] += other.support_gt_[i];
        gap_lt_[i] += other.gap_lt_[i];
    }
    samples_ += other.samples_;
}

SupportBoundReport support_bound_check(std::size_t n, std::span<const std::size_t> k_values,
                                       std::size_t trials, std::uint64_t seed, unsigned threads)
{
    if (trials < 1000) {
        throw std::invalid_argument("support_bound_check: trials must be >= 1000");
    }
    for (const std::size_t k : k_values) {
        if (k < 1 || k >= n) {
            throw std::invalid_argument("support_bound_check: each k must satisfy 1 <= k < n");
        }
    }
    const std::vector<std::size_t> ks(k_values.begin(), k_values.end());
    const std::size_t blocks = block_count(trials);
    std::vector<SupportBoundTally> partial(blocks, SupportBoundTally(ks));
    parallel_for(blocks, threads, [&](std::size_t bb, std::size_t be) {
        std::vector<double> s(n);
        for (std::size_t b = bb; b < be; ++b) {
            Rng rng(seed, block_stream(0, b));
            const std::size_t end = std::min(trials, (b + 1) * kTrialBlock);
            for (std::size_t t = b * kTrialBlock; t < end; ++t) {
                for (auto& v : s) {
                    v = rng.normal();
                }
                partial[b].add(s);
            }
        }
    });
    SupportBoundTally total(ks);
    for (const auto& p : partial) {
        total.merge(p);
    }

    SupportBoundReport report;
    report.n = n;
    report.k_values = ks;
    report.trials = trials;
    const auto denom = static_cast<double>(trials);
    for (std::size_t i = 0; i < ks.size(); ++i) {
        report.p_support_gt_k.push_back(static_cast<double>(total.support_exceeds()[i]) / denom);
        report.p_gap_lt_inv_k.push_back(static_cast<double>(total.gap_below()[i]) / denom);
    }
    return report;
}

std::string to_csv(const FlatnessProfile& profile)
{
    std::ostringstream os;
    os << std::setprecision(17);
    os << "length,mean_max_prob,mean_entropy,mean_support_st\n";
    for (std::size_t i = 0; i < profile.sequence_lengths.size(); ++i) {
        os << profile.sequence_lengths[i] << ',' << profile.mean_max_prob[i] << ','
           << profile.mean_entropy[i] << ',' << profile.mean_support_size_st[i] << '\n';
    }
    return os.str();
}

std::string to_csv(const SupportBoundReport& report)
{
    std::ostringstream os;
    os << std::setprecision(17);
    os << "k,p_support_gt_k,p_gap_lt_inv_k\n";
    for (std::size_t i = 0; i < report.k_values.size(); ++i) {
        os << report.k_values[i] << ',' << report.p_support_gt_k[i] << ','
           << report.p_gap_lt_inv_k[i] << '\n';
    }
    return os.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    }
    out << text;
    out.flush();
    if (!out) {
        throw std::runtime_error("failed writing '" + path.string() + "'");
    }
}

void emit_csv(const FlatnessProfile& profile, const std::filesystem::path& path)
{
    write_text_file(path, to_csv(profile));
}

void emit_csv(const SupportBoundReport& report, const std::filesystem::path& path)
{
    write_text_file(path, to_csv(report));
}

} // namespace hspa
