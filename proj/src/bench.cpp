#include "hspa/bench.hpp"

#include "hspa/rng.hpp"
#include "hspa/simplex_ops.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <unistd.h>

namespace hspa {

std::string_view to_string(BenchOp op)
{
    switch (op) {
    case BenchOp::exact: return "exact";
    case BenchOp::topk: return "topk";
    case BenchOp::softmax: return "softmax";
    case BenchOp::jvp: return "jvp";
    }
    return "unknown";
}

BenchOp parse_bench_op(std::string_view name)
{
    for (const auto op : {BenchOp::exact, BenchOp::topk, BenchOp::softmax, BenchOp::jvp}) {
        if (name == to_string(op)) {
            return op;
        }
    }
    throw std::invalid_argument("unknown bench op '" + std::string(name) +
                                "' (expected exact, topk, softmax or jvp)");
}

namespace {

std::vector<double> normal_vector(std::size_t n, std::uint64_t seed, std::uint64_t stream)
{
    Rng rng(seed, stream);
    std::vector<double> v(n);
    for (auto& x : v) {
        x = rng.normal();
    }
    return v;
}

double percentile(std::vector<double> sorted, double q)
{
    std::sort(sorted.begin(), sorted.end());
    const auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(sorted.size())));
    return sorted[std::max<std::size_t>(rank, 1) - 1];
}

// Runs op on s once, returning (elapsed ns, checksum of the result).
std::pair<double, double> timed_call(BenchOp op, std::span<const double> s,
                                     std::span<const double> feedback, std::size_t k)
{
    using clock = std::chrono::steady_clock;
    double checksum = 0.0;
    clock::time_point start;
    clock::time_point stop;
    switch (op) {
    case BenchOp::exact: {
        start = clock::now();
        const SparseWeights w = soft_threshold_exact(s);
        stop = clock::now();
        checksum = output_checksum(w.weights);
        break;
    }
    case BenchOp::topk: {
        start = clock::now();
        const SparseWeights w = soft_threshold_topk(s, k);
        stop = clock::now();
        checksum = output_checksum(w.weights);
        break;
    }
    case BenchOp::softmax: {
        start = clock::now();
        const std::vector<double> p = softmax(s);
        stop = clock::now();
        checksum = output_checksum(p);
        break;
    }
    case BenchOp::jvp: {
        const JacobianContext ctx = soft_threshold_topk(s, k).jacobian();
        start = clock::now();
        const std::vector<double> g = jvp_on_support(ctx, feedback);
        stop = clock::now();
        checksum = output_checksum(g, ctx.support, s.size());
        break;
    }
    }
    return {static_cast<double>(std::chrono::duration_cast<std::chrono::nanoseconds>(stop - start).count()),
            checksum};
}

} // namespace

std::vector<double> bench_input(std::size_t n, std::size_t rep, std::uint64_t seed)
{
    return normal_vector(n, seed, (static_cast<std::uint64_t>(n) << 24) | rep);
}

std::vector<double> bench_feedback(std::size_t n, std::size_t rep, std::uint64_t seed)
{
    return normal_vector(n, seed, (static_cast<std::uint64_t>(n) << 24) | rep | (1ULL << 23));
}

double output_checksum(std::span<const double> values)
{
    double acc = 0.0;
    for (std::size_t j = 0; j < values.size(); ++j) {
        acc += static_cast<double>(j + 1) * values[j];
    }
    return acc / static_cast<double>(values.size());
}

double output_checksum(std::span<const double> values, std::span<const std::size_t> indices,
                       std::size_t n)
{
    double acc = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        acc += static_cast<double>(indices[i] + 1) * values[i];
    }
    return acc / static_cast<double>(n);
}

std::vector<BenchRecord> run_bench(const BenchOptions& opts)
{
    if (opts.reps < 1) {
        throw std::invalid_argument("run_bench: reps must be >= 1");
    }
    if (opts.k < 1) {
        throw std::invalid_argument("run_bench: k must be >= 1");
    }
    if (opts.reps >= (1u << 23)) {
        throw std::invalid_argument("run_bench: too many reps");
    }
    for (const std::size_t n : opts.lengths) {
        if (n < 2) {
            throw std::invalid_argument("run_bench: lengths must be >= 2");
        }
    }

    std::vector<BenchRecord> records;
    for (const BenchOp op : opts.ops) {
        for (const std::size_t n : opts.lengths) {
            {
                const auto warm = bench_input(n, 0, opts.seed);
                const auto warm_r = bench_feedback(n, 0, opts.seed);
                for (std::size_t w = 0; w < opts.warmup; ++w) {
                    timed_call(op, warm, warm_r, opts.k);
                }
            }
            std::vector<double> times;
            times.reserve(opts.reps);
            double checksum = 0.0;
            for (std::size_t rep = 0; rep < opts.reps; ++rep) {
                const auto s = bench_input(n, rep, opts.seed);
                const auto r = op == BenchOp::jvp ? bench_feedback(n, rep, opts.seed) : std::vector<double>{};
                const auto [ns, sum] = timed_call(op, s, r, opts.k);
                times.push_back(ns);
                checksum += sum;
            }
            BenchRecord rec;
            rec.op = std::string(to_string(op));
            rec.n = n;
            if (op == BenchOp::topk || op == BenchOp::jvp) {
                rec.k = opts.k;
            }
            rec.reps = opts.reps;
            rec.p50_ns = percentile(times, 0.5);
            rec.p90_ns = percentile(times, 0.9);
            rec.checksum = checksum;
            records.push_back(std::move(rec));
        }
    }
    return records;
}

std::string to_csv(std::span<const BenchRecord> records)
{
    std::ostringstream os;
    os << std::setprecision(17);
    os << "op,n,k,reps,p50_ns,p90_ns,checksum\n";
    for (const auto& r : records) {
        os << r.op << ',' << r.n << ',';
        if (r.k) {
            os << *r.k;
        }
        os << ',' << r.reps << ',' << r.p50_ns << ',' << r.p90_ns << ',' << r.checksum << '\n';
    }
    return os.str();
}

std::string machine_label()
{
    char host[256] = {};
    if (gethostname(host, sizeof(host) - 1) != 0) {
        host[0] = '?';
    }
    std::ostringstream os;
    os << "host=" << host << " cores=" << std::thread::hardware_concurrency();
#if defined(__clang__)
    os << " compiler=clang-" << __clang_major__ << '.' << __clang_minor__;
#elif defined(__GNUC__)
    os << " compiler=gcc-" << __GNUC__ << '.' << __GNUC_MINOR__;
#endif
#ifdef NDEBUG
    os << " build=release";
#else
    os << " build=debug";
#endif
    return os.str();
}

} // namespace hspa
