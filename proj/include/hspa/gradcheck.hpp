#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hspa {

struct GradCheckOptions {
    double step = 1e-6;
    double tie_radius = 1e-4;     // points with an entry this close to the threshold are skipped
    double rel_tolerance = 1e-5;
    double abs_floor = 1e-8;      // errors below this never count as failures
    double dense_tolerance = 1e-12;
};

struct GradCheckReport {
    double max_rel_error = 0.0;
    double max_abs_error = 0.0;
    double max_dense_mismatch = 0.0; // |jacobian_dense * r - jvp| over all accepted points
    std::size_t num_points = 0;      // points examined, including skipped ones
    std::size_t num_skipped_ties = 0;

    std::size_t num_compared() const { return num_points - num_skipped_ties; }
    /// Fails when every point was skipped: nothing was verified.
    bool passed(const GradCheckOptions& opts) const;
    /// One line, key=value pairs, suitable for log scraping.
    std::string summary(const GradCheckOptions& opts) const;
};

/// True when some entry of s lies within `radius` of the soft threshold of s,
/// where the projection is not differentiable.
bool near_support_boundary(std::span<const double> s, double radius);

/// Central difference (ST(s + h r) - ST(s - h r)) / (2h) of the exact soft
/// threshold. Returns nullopt for tie-adjacent inputs: any entry within
/// max(tie_radius, 10 h max(1, |r|_inf)) of the threshold.
std::optional<std::vector<double>> finite_difference_jvp(std::span<const double> s,
                                                         std::span<const double> r, double step,
                                                         double tie_radius = 0.0);

/// Accumulates analytic-vs-numeric comparisons point by point.
class GradChecker {
public:
    explicit GradChecker(GradCheckOptions opts = {}) : opts_(opts) {}

    void check(std::span<const double> s, std::span<const double> r);
    void merge(const GradCheckReport& other);

    const GradCheckReport& report() const { return report_; }

private:
    GradCheckOptions opts_;
    GradCheckReport report_;
};

/// Standard-normal s and r per trial; trial t draws from stream t of `seed`.
GradCheckReport run_gradcheck(std::size_t trials, std::size_t n, std::uint64_t seed,
                              const GradCheckOptions& opts = {}, unsigned threads = 1);

} // namespace hspa
