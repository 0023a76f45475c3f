#include "hspa/gradcheck.hpp"

#include "hspa/parallel.hpp"
#include "hspa/rng.hpp"
#include "hspa/simplex_ops.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace hspa {

namespace {

double max_abs(std::span<const double> v)
{
    double m = 0.0;
    for (const double x : v) {
        m = std::max(m, std::abs(x));
    }
    return m;
}

} // namespace

bool GradCheckReport::passed(const GradCheckOptions& opts) const
{
    return num_compared() >= 1 && max_rel_error <= opts.rel_tolerance &&
           max_dense_mismatch <= opts.dense_tolerance;
}

std::string GradCheckReport::summary(const GradCheckOptions& opts) const
{
    std::ostringstream os;
    os << std::setprecision(17) << "gradcheck points=" << num_points
       << " compared=" << num_compared() << " skipped_ties=" << num_skipped_ties
       << " max_rel_error=" << max_rel_error << " max_abs_error=" << max_abs_error
       << " max_dense_mismatch=" << max_dense_mismatch
       << " status=" << (passed(opts) ? "pass" : "fail");
    return os.str();
}

bool near_support_boundary(std::span<const double> s, double radius)
{
    const double kappa = soft_threshold_exact(s).threshold;
    return std::any_of(s.begin(), s.end(),
                       [&](double v) { return std::abs(v - kappa) <= radius; });
}

std::optional<std::vector<double>> finite_difference_jvp(std::span<const double> s,
                                                         std::span<const double> r, double step,
                                                         double tie_radius)
{
    if (!(step > 0.0)) {
        throw std::invalid_argument("finite_difference_jvp: step must be positive");
    }
    if (r.size() != s.size()) {
        throw std::invalid_argument("finite_difference_jvp: dimension mismatch");
    }
    const double guard = std::max(tie_radius, 10.0 * step * std::max(1.0, max_abs(r)));
    if (near_support_boundary(s, guard)) {
        return std::nullopt;
    }
    std::vector<double> plus(s.begin(), s.end());
    std::vector<double> minus(s.begin(), s.end());
    for (std::size_t j = 0; j < s.size(); ++j) {
        plus[j] += step * r[j];
        minus[j] -= step * r[j];
    }
    const auto up = soft_threshold_exact(plus).weights;
    const auto down = soft_threshold_exact(minus).weights;
    std::vector<double> out(s.size());
    for (std::size_t j = 0; j < s.size(); ++j) {
        out[j] = (up[j] - down[j]) / (2.0 * step);
    }
    return out;
}

void GradChecker::check(std::span<const double> s, std::span<const double> r)
{
    ++report_.num_points;
    const auto numeric = finite_difference_jvp(s, r, opts_.step, opts_.tie_radius);
    if (!numeric) {
        ++report_.num_skipped_ties;
        return;
    }
    const JacobianContext ctx = soft_threshold_exact(s).jacobian();
    const std::vector<double> analytic = jvp(ctx, r);

    double diff = 0.0;
    for (std::size_t j = 0; j < s.size(); ++j) {
        diff = std::max(diff, std::abs(analytic[j] - (*numeric)[j]));
    }
    // Relative to the larger of the two vectors; tiny vectors fall back to
    // abs_floor / rel_tolerance so that an abs_floor-sized error is exactly at tolerance.
    const double scale = std::max({max_abs(analytic), max_abs(*numeric),
                                   opts_.abs_floor / opts_.rel_tolerance});
    report_.max_abs_error = std::max(report_.max_abs_error, diff);
    report_.max_rel_error = std::max(report_.max_rel_error, diff / scale);

    if (s.size() <= kMaxDenseJacobian) {
        const std::vector<double> dense = jacobian_dense(ctx).multiply(r);
        for (std::size_t j = 0; j < s.size(); ++j) {
            report_.max_dense_mismatch =
                std::max(report_.max_dense_mismatch, std::abs(dense[j] - analytic[j]));
        }
    }
}

void GradChecker::merge(const GradCheckReport& other)
{
    report_.max_rel_error = std::max(report_.max_rel_error, other.max_rel_error);
    report_.max_abs_error = std::max(report_.max_abs_error, other.max_abs_error);
    report_.max_dense_mismatch = std::max(report_.max_dense_mismatch, other.max_dense_mismatch);
    report_.num_points += other.num_points;
    report_.num_skipped_ties += other.num_skipped_ties;
}

GradCheckReport run_gradcheck(std::size_t trials, std::size_t n, std::uint64_t seed,
                              const GradCheckOptions& opts, unsigned threads)
{
    if (trials < 1) {
        throw std::invalid_argument("run_gradcheck: trials must be >= 1");
    }
    if (n < 2) {
        throw std::invalid_argument("run_gradcheck: n must be >= 2");
    }
    const std::size_t workers = std::min<std::size_t>(resolve_threads(threads), trials);
    std::vector<GradCheckReport> partial(workers);
    const std::size_t chunk = (trials + workers - 1) / workers;
    parallel_for(workers, static_cast<unsigned>(workers), [&](std::size_t wb, std::size_t we) {
        for (std::size_t w = wb; w < we; ++w) {
            GradChecker checker(opts);
            std::vector<double> s(n), r(n);
            for (std::size_t t = w * chunk; t < std::min(trials, (w + 1) * chunk); ++t) {
                Rng rng(seed, t);
                for (auto& v : s) {
                    v = rng.normal();
                }
                for (auto& v : r) {
                    v = rng.normal();
                }
                checker.check(s, r);
            }
            partial[w] = checker.report();
        }
    });
    GradChecker total(opts);
    for (const auto& p : partial) {
        total.merge(p);
    }
    return total.report();
}

} // namespace hspa
