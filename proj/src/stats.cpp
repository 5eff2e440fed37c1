#include "divprof/stats.hpp"

#include "divprof/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace divprof::stats {

namespace {

// Regularized lower incomplete gamma P(a,x) by series expansion; converges
// for x < a+1.
double gamma_p_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    double ap = a;
    for (int n = 0; n < 500; ++n) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Regularized upper incomplete gamma Q(a,x) by Lentz's continued fraction;
// converges for x >= a+1.
double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < 1e-16) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q(double a, double x) {
    if (x <= 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_cf(a, x);
}

struct RankedValue {
    double value;
    std::size_t group;
};

// Mid-rank assignment; fills `ranks` aligned with `sorted` and returns the
// tie-correction sum  T = sum(t^3 - t)  over tie groups.
double assign_midranks(const std::vector<RankedValue>& sorted, std::vector<double>& ranks) {
    const std::size_t n = sorted.size();
    ranks.resize(n);
    double tie_sum = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && sorted[j + 1].value == sorted[i].value) ++j;
        const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t k = i; k <= j; ++k) ranks[k] = midrank;
        const double t = static_cast<double>(j - i + 1);
        if (t > 1.0) tie_sum += t * t * t - t;
        i = j + 1;
    }
    return tie_sum;
}

// P(U_a <= u) for the exact null distribution of U with group sizes n1, n2.
// Counts rank configurations with the recurrence
//   c(i, j, v) = c(i-1, j, v - j) + c(i, j-1, v)
// where i, j are the remaining group sizes and v the statistic value.
double exact_u_cdf(std::size_t n1, std::size_t n2, double u) {
    const std::size_t umax = n1 * n2;
    std::vector<std::vector<std::vector<double>>> c(
        n1 + 1, std::vector<std::vector<double>>(n2 + 1, std::vector<double>(umax + 1, 0.0)));
    for (std::size_t j = 0; j <= n2; ++j) c[0][j][0] = 1.0;
    for (std::size_t i = 0; i <= n1; ++i) c[i][0][0] = 1.0;
    for (std::size_t i = 1; i <= n1; ++i) {
        for (std::size_t j = 1; j <= n2; ++j) {
            for (std::size_t v = 0; v <= i * j; ++v) {
                double total = c[i][j - 1][v];
                if (v >= j) total += c[i - 1][j][v - j];
                c[i][j][v] = total;
            }
        }
    }
    double count = 0.0;
    const auto limit = static_cast<std::size_t>(std::floor(u + 1e-9));
    for (std::size_t v = 0; v <= std::min(limit, umax); ++v) {
        count += c[n1][n2][v];
    }
    double total = 0.0;
    for (std::size_t v = 0; v <= umax; ++v) total += c[n1][n2][v];
    return count / total;
}

} // namespace

double chi2_sf(double x, std::size_t df) {
    if (df == 0) {
        throw InvalidArgument("chi2_sf: df must be >= 1");
    }
    if (x <= 0.0) return 1.0;
    return gamma_q(static_cast<double>(df) / 2.0, x / 2.0);
}

double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

StatTestResult kruskal_wallis(std::span<const std::vector<double>> groups) {
    if (groups.size() < 2) {
        throw InvalidArgument("kruskal_wallis: needs at least 2 groups");
    }
    std::size_t n_total = 0;
    for (const auto& g : groups) {
        if (g.empty()) {
            throw InvalidArgument("kruskal_wallis: empty group");
        }
        n_total += g.size();
    }
    if (n_total < 3) {
        throw InvalidArgument("kruskal_wallis: needs at least 3 values");
    }

    std::vector<RankedValue> pooled;
    pooled.reserve(n_total);
    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
        for (double v : groups[gi]) pooled.push_back({v, gi});
    }
    std::stable_sort(pooled.begin(), pooled.end(),
                     [](const RankedValue& a, const RankedValue& b) { return a.value < b.value; });
    std::vector<double> ranks;
    const double tie_sum = assign_midranks(pooled, ranks);

    const double n = static_cast<double>(n_total);
    const double tie_correction = 1.0 - tie_sum / (n * n * n - n);
    if (tie_correction <= 0.0) {
        throw DegenerateData("kruskal_wallis: all values identical");
    }

    std::vector<double> rank_sums(groups.size(), 0.0);
    for (std::size_t i = 0; i < pooled.size(); ++i) {
        rank_sums[pooled[i].group] += ranks[i];
    }
    double h = 0.0;
    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
        h += rank_sums[gi] * rank_sums[gi] / static_cast<double>(groups[gi].size());
    }
    h = 12.0 / (n * (n + 1.0)) * h - 3.0 * (n + 1.0);
    h /= tie_correction;
    if (h < 0.0 && h > -1e-12) h = 0.0; // rounding guard near the no-difference case

    StatTestResult result;
    result.statistic = h;
    result.df = groups.size() - 1;
    result.p_value = chi2_sf(h, result.df);
    result.method = "kruskal-wallis";
    for (const auto& g : groups) result.group_sizes.push_back(g.size());
    return result;
}

StatTestResult mann_whitney_u(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) {
        throw InvalidArgument("mann_whitney_u: empty input");
    }
    const std::size_t n1 = a.size();
    const std::size_t n2 = b.size();
    const std::size_t n_total = n1 + n2;

    std::vector<RankedValue> pooled;
    pooled.reserve(n_total);
    for (double v : a) pooled.push_back({v, 0});
    for (double v : b) pooled.push_back({v, 1});
    std::stable_sort(pooled.begin(), pooled.end(),
                     [](const RankedValue& x, const RankedValue& y) { return x.value < y.value; });
    std::vector<double> ranks;
    const double tie_sum = assign_midranks(pooled, ranks);

    double rank_sum_a = 0.0;
    for (std::size_t i = 0; i < pooled.size(); ++i) {
        if (pooled[i].group == 0) rank_sum_a += ranks[i];
    }
    const double u_a = rank_sum_a - static_cast<double>(n1) * (static_cast<double>(n1) + 1.0) / 2.0;
    const double u_b = static_cast<double>(n1) * static_cast<double>(n2) - u_a;
    const double u = std::min(u_a, u_b);

    StatTestResult result;
    result.statistic = u;
    result.df = 0;
    result.group_sizes = {n1, n2};
    result.effect_size = 1.0 - 2.0 * u / (static_cast<double>(n1) * static_cast<double>(n2));

    const bool has_ties = tie_sum > 0.0;
    if (!has_ties && n_total <= 20) {
        result.method = "mann-whitney-u/exact";
        result.p_value = std::min(1.0, 2.0 * exact_u_cdf(n1, n2, u));
        return result;
    }

    result.method = "mann-whitney-u/normal";
    const double n = static_cast<double>(n_total);
    const double mu = static_cast<double>(n1) * static_cast<double>(n2) / 2.0;
    const double variance = static_cast<double>(n1) * static_cast<double>(n2) / 12.0 *
                            ((n + 1.0) - tie_sum / (n * (n - 1.0)));
    if (variance <= 0.0) {
        result.p_value = 1.0; // every value tied with every other
        return result;
    }
    const double z = (std::fabs(u - mu) - 0.5) / std::sqrt(variance);
    result.p_value = std::min(1.0, 2.0 * normal_sf(z));
    return result;
}

std::vector<double> holm_correct(std::span<const double> p_values) {
    for (double p : p_values) {
        if (!(p >= 0.0 && p <= 1.0)) {
            throw InvalidArgument("holm_correct: p-values must lie in [0,1]");
        }
    }
    const std::size_t m = p_values.size();
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return p_values[i] < p_values[j]; });
    std::vector<double> adjusted(m, 0.0);
    double running_max = 0.0;
    for (std::size_t rank = 0; rank < m; ++rank) {
        const double scaled = std::min(1.0, static_cast<double>(m - rank) * p_values[order[rank]]);
        running_max = std::max(running_max, scaled);
        adjusted[order[rank]] = running_max;
    }
    return adjusted;
}

double pearson_r(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        throw InvalidArgument("pearson_r: length mismatch");
    }
    if (x.size() < 2) {
        throw InvalidArgument("pearson_r: needs at least 2 pairs");
    }
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) {
        throw DegenerateData("pearson_r: constant input");
    }
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double quantile(std::span<const double> sorted_values, double q) {
    if (sorted_values.empty()) {
        throw InvalidArgument("quantile: empty input");
    }
    if (!(q >= 0.0 && q <= 1.0)) {
        throw InvalidArgument("quantile: q must lie in [0,1]");
    }
    const double pos = q * static_cast<double>(sorted_values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = static_cast<std::size_t>(std::ceil(pos));
    const double frac = pos - static_cast<double>(lo);
    return sorted_values[lo] + frac * (sorted_values[hi] - sorted_values[lo]);
}

Descriptive describe(std::span<const double> values) {
    if (values.empty()) {
        throw InvalidArgument("describe: empty input");
    }
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    Descriptive d;
    d.min = sorted.front();
    d.max = sorted.back();
    d.q1 = quantile(sorted, 0.25);
    d.median = quantile(sorted, 0.5);
    d.q3 = quantile(sorted, 0.75);
    d.mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(sorted.size());
    if (sorted.size() > 1) {
        double ss = 0.0;
        for (double v : sorted) {
            const double dv = v - d.mean;
            ss += dv * dv;
        }
        d.sd = std::sqrt(ss / static_cast<double>(sorted.size() - 1));
    }
    return d;
}

DensityCurve kde_density(std::span<const double> values, std::size_t grid_size) {
    if (values.size() < 2) {
        throw DegenerateData("kde_density: needs at least 2 values");
    }
    if (grid_size < 2) {
        throw InvalidArgument("kde_density: grid_size must be >= 2");
    }
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const double lo = sorted.front();
    const double hi = sorted.back();
    if (lo == hi) {
        throw DegenerateData("kde_density: constant values");
    }

    const Descriptive d = describe(sorted);
    const double iqr = d.q3 - d.q1;
    double spread = std::min(d.sd, iqr / 1.34);
    if (spread <= 0.0) spread = d.sd; // IQR can vanish while the data still varies
    const double n = static_cast<double>(sorted.size());
    double h = 0.9 * spread * std::pow(n, -0.2);
    h = std::max(h, 1e-9 * (hi - lo));

    DensityCurve curve;
    curve.bandwidth = h;
    curve.xs.resize(grid_size);
    curve.ys.resize(grid_size);
    const double x0 = lo - 3.0 * h;
    const double x1 = hi + 3.0 * h;
    const double step = (x1 - x0) / static_cast<double>(grid_size - 1);
    const double scale = 1.0 / (n * h * std::sqrt(2.0 * M_PI));
    for (std::size_t i = 0; i < grid_size; ++i) {
        const double x = x0 + step * static_cast<double>(i);
        double y = 0.0;
        for (double v : sorted) {
            const double t = (x - v) / h;
            y += std::exp(-0.5 * t * t);
        }
        curve.xs[i] = x;
        curve.ys[i] = y * scale;
    }

    // normalize: the finite grid clips kernel tails, so rescale to unit mass
    double integral = 0.0;
    for (std::size_t i = 1; i < grid_size; ++i) {
        integral += 0.5 * (curve.ys[i] + curve.ys[i - 1]) * (curve.xs[i] - curve.xs[i - 1]);
    }
    if (integral > 0.0) {
        for (double& y : curve.ys) y /= integral;
    }
    return curve;
}

} // namespace divprof::stats
