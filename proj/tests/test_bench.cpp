#include "doctest.h"
#include "oracles.hpp"

#include "hspa/bench.hpp"
#include "hspa/simplex_ops.hpp"

#include <cmath>

using namespace hspa;

namespace {

double weighted_sum(const std::vector<double>& v)
{
    double acc = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j) {
        acc += static_cast<double>(j + 1) * v[j];
    }
    return acc / static_cast<double>(v.size());
}

BenchOptions small_options()
{
    BenchOptions opts;
    opts.lengths = {64, 500};
    opts.k = 16;
    opts.reps = 5;
    opts.warmup = 1;
    opts.seed = 4;
    return opts;
}

} // namespace

TEST_CASE("bench inputs come from the documented stream")
{
    const auto s = bench_input(100, 3, 9);
    oracle::SplitMix rng(9, (std::uint64_t{100} << 24) | 3);
    for (const double v : s) {
        CHECK(v == rng.normal());
    }
    const auto r = bench_feedback(100, 3, 9);
    oracle::SplitMix rr(9, (std::uint64_t{100} << 24) | 3 | (1ULL << 23));
    CHECK(r[0] == rr.normal());
}

TEST_CASE("run_bench: checksums are reproducible and match the plain API")
{
    const auto opts = small_options();
    const auto a = run_bench(opts);
    const auto b = run_bench(opts);
    REQUIRE(a.size() == 8);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].checksum == b[i].checksum);
        CHECK(std::isfinite(a[i].checksum));
        CHECK(a[i].p50_ns <= a[i].p90_ns);
        CHECK(a[i].reps == 5);
    }

    for (const auto& rec : a) {
        double want = 0.0;
        for (std::size_t rep = 0; rep < opts.reps; ++rep) {
            const auto s = bench_input(rec.n, rep, opts.seed);
            const auto op = parse_bench_op(rec.op);
            if (op == BenchOp::exact) {
                want += weighted_sum(soft_threshold_exact(s).weights);
            } else if (op == BenchOp::topk) {
                want += weighted_sum(soft_threshold_topk(s, opts.k).weights);
            } else if (op == BenchOp::softmax) {
                want += weighted_sum(softmax(s));
            } else {
                const auto ctx = soft_threshold_topk(s, opts.k).jacobian();
                want += weighted_sum(jvp(ctx, bench_feedback(rec.n, rep, opts.seed)));
            }
        }
        CHECK(rec.checksum == doctest::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("bench CSV layout")
{
    const auto recs = run_bench(small_options());
    const auto csv = oracle::parse_csv(to_csv(recs));
    REQUIRE(csv.header == std::vector<std::string>{"op", "n", "k", "reps", "p50_ns", "p90_ns", "checksum"});
    REQUIRE(csv.rows.size() == recs.size());
    const std::string text = to_csv(recs);
    CHECK(text.find("\nexact,64,,5,") != std::string::npos);
    CHECK(text.find("\ntopk,64,16,5,") != std::string::npos);
    CHECK_FALSE(machine_label().empty());
}

TEST_CASE("bench op names and validation")
{
    for (const auto op : {BenchOp::exact, BenchOp::topk, BenchOp::softmax, BenchOp::jvp}) {
        CHECK(parse_bench_op(to_string(op)) == op);
    }
    CHECK_THROWS_AS(parse_bench_op("sort"), std::invalid_argument);
    BenchOptions bad = small_options();
    bad.reps = 0;
    CHECK_THROWS_AS(run_bench(bad), std::invalid_argument);
    bad = small_options();
    bad.lengths = {1};
    CHECK_THROWS_AS(run_bench(bad), std::invalid_argument);
}

TEST_CASE("jvp cost is bounded by the support, not the length")
{
    BenchOptions opts;
    opts.ops = {BenchOp::jvp};
    opts.lengths = {1024, 65536};
    opts.k = 128;
    opts.reps = 50;
    const auto recs = run_bench(opts);
    MESSAGE("jvp p50 n=1024: " << recs[0].p50_ns << " ns, n=65536: " << recs[1].p50_ns << " ns");
    CHECK(recs[1].p50_ns <= 10.0 * std::max(recs[0].p50_ns, 1.0));
}
