#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace divprof::stats {

struct StatTestResult {
    double statistic = 0.0;
    std::size_t df = 0; // 0 when not applicable
    double p_value = 1.0;
    std::optional<double> p_adjusted;
    std::string method;
    std::vector<std::size_t> group_sizes;
    std::optional<double> effect_size; // rank-biserial for Mann-Whitney results
};

struct DensityCurve {
    std::vector<double> xs; // ascending grid
    std::vector<double> ys; // density >= 0, trapezoid integral ~ 1
    double bandwidth = 0.0;
};

// Upper tail of the chi-square distribution via the regularized incomplete
// gamma function (series / continued fraction, abs tol ~1e-14).
double chi2_sf(double x, std::size_t df);

// Upper tail of the standard normal.
double normal_sf(double z);

// Kruskal-Wallis H on mid-ranks with tie correction; p from chi-square with
// df = k-1. Requires >= 2 groups, each non-empty, >= 3 values total. All
// values identical is degenerate (the tie correction divides by zero).
StatTestResult kruskal_wallis(std::span<const std::vector<double>> groups);

// U = min(U_a, U_b). Exact two-sided p by distribution enumeration when
// n_a+n_b <= 20 and there are no ties; otherwise normal approximation with
// tie correction and 0.5 continuity correction.
StatTestResult mann_whitney_u(std::span<const double> a, std::span<const double> b);

// Holm step-down adjustment, returned in input order.
std::vector<double> holm_correct(std::span<const double> p_values);

// Sample Pearson correlation, clamped to [-1, 1]. Constant input is an error.
double pearson_r(std::span<const double> x, std::span<const double> y);

// Gaussian KDE on a uniform grid over [min-3h, max+3h] with Silverman's
// bandwidth h = 0.9*min(sd, IQR/1.34)*n^(-1/5) (sd fallback when IQR is 0,
// floor 1e-9*range). The curve is normalized so its trapezoid integral is 1.
DensityCurve kde_density(std::span<const double> values, std::size_t grid_size = 256);

// Linear-interpolation quantile (the common "type 7" definition); q in [0,1].
double quantile(std::span<const double> sorted_values, double q);

struct Descriptive {
    double min = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, max = 0.0;
    double mean = 0.0, sd = 0.0;
};

Descriptive describe(std::span<const double> values);

} // namespace divprof::stats
