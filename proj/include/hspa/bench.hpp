#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hspa {

enum class BenchOp { exact, topk, softmax, jvp };

std::string_view to_string(BenchOp op);
BenchOp parse_bench_op(std::string_view name);

struct BenchRecord {
    std::string op;
    std::size_t n = 0;
    std::optional<std::size_t> k;
    std::size_t reps = 0;
    double p50_ns = 0.0;
    double p90_ns = 0.0;
    double checksum = 0.0;
};

struct BenchOptions {
    std::vector<BenchOp> ops{BenchOp::exact, BenchOp::topk, BenchOp::softmax, BenchOp::jvp};
    std::vector<std::size_t> lengths{1024, 16384, 65536};
    std::size_t k = 128;
    std::size_t reps = 30;
    std::size_t warmup = 3;
    std::uint64_t seed = 0;
};

/// Standard-normal input for repetition `rep` at length n: stream (n << 24) | rep.
std::vector<double> bench_input(std::size_t n, std::size_t rep, std::uint64_t seed);
/// Feedback vector for the jvp op: stream (n << 24) | rep | 1 << 23.
std::vector<double> bench_feedback(std::size_t n, std::size_t rep, std::uint64_t seed);

/// sum_j (j + 1) * values[j] / n over a dense output.
double output_checksum(std::span<const double> values);
/// Same weighting for an output given only on `indices`.
double output_checksum(std::span<const double> values, std::span<const std::size_t> indices,
                       std::size_t n);

/// Times each op once per repetition on a fresh input (inputs are generated
/// outside the timed region). Single-threaded; steady_clock.
/// The jvp op times jvp_on_support for the top-k support of the input.
std::vector<BenchRecord> run_bench(const BenchOptions& opts);

/// CSV schema op,n,k,reps,p50_ns,p90_ns,checksum; k is empty when not applicable.
std::string to_csv(std::span<const BenchRecord> records);

/// Host, compiler and core count; timings are only meaningful on this machine.
std::string machine_label();

} // namespace hspa
