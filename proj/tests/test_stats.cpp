#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "divprof/error.hpp"
#include "divprof/stats.hpp"
#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <random>

using namespace divprof;
using doctest::Approx;

TEST_CASE("chi2_sf reference values") {
    // frozen from an independent implementation of the regularized
    // incomplete gamma function
    CHECK(stats::chi2_sf(3.857142857142857, 1) == Approx(0.04953461343562649).epsilon(1e-10));
    CHECK(stats::chi2_sf(1.0, 1) == Approx(0.31731050786291115).epsilon(1e-10));
    CHECK(stats::chi2_sf(2.0, 2) == Approx(0.36787944117144245).epsilon(1e-10));
    CHECK(stats::chi2_sf(5.0, 3) == Approx(0.1717971442967335).epsilon(1e-10));
    CHECK(stats::chi2_sf(10.0, 4) == Approx(0.04042768199451279).epsilon(1e-10));
    CHECK(stats::chi2_sf(0.5, 7) == Approx(0.9994464813904249).epsilon(1e-10));
    CHECK(stats::chi2_sf(0.0, 1) == Approx(1.0));
    CHECK(stats::chi2_sf(-3.0, 2) == Approx(1.0));
    CHECK_THROWS_AS(stats::chi2_sf(1.0, 0), InvalidArgument);
}

TEST_CASE("chi2_sf monotonicity") {
    double prev = 1.0;
    for (double h = 0.25; h < 30.0; h += 0.25) {
        const double p = stats::chi2_sf(h, 3);
        CHECK(p < prev);
        prev = p;
    }
}

TEST_CASE("kruskal_wallis golden example") {
    const std::vector<std::vector<double>> groups = {{1, 2, 3}, {4, 5, 6}};
    const auto result = stats::kruskal_wallis(groups);
    CHECK(result.statistic == Approx(3.857142857142857).epsilon(1e-9));
    CHECK(result.df == 1);
    CHECK(result.p_value == Approx(0.049534613435626).epsilon(1e-6));
    CHECK(result.method == "kruskal-wallis");
    CHECK(result.group_sizes == std::vector<std::size_t>{3, 3});
}

TEST_CASE("kruskal_wallis symmetry and ties") {
    const std::vector<std::vector<double>> ab = {{1, 2, 3}, {4, 5, 6}};
    const std::vector<std::vector<double>> ba = {{4, 5, 6}, {1, 2, 3}};
    CHECK(stats::kruskal_wallis(ab).statistic ==
          Approx(stats::kruskal_wallis(ba).statistic).epsilon(1e-12));

    // symmetric mid-ranks give H = 0 and p = 1
    const std::vector<std::vector<double>> tied = {{1, 2}, {1, 2}};
    const auto result = stats::kruskal_wallis(tied);
    CHECK(result.statistic == Approx(0.0));
    CHECK(result.p_value == Approx(1.0));
}

TEST_CASE("kruskal_wallis tie correction against frozen references") {
    // frozen from an independent tie-corrected implementation
    const std::vector<std::vector<double>> two = {{1, 1, 2, 3}, {2, 3, 3, 4}};
    const auto r2 = stats::kruskal_wallis(two);
    CHECK(r2.statistic == Approx(2.7147435897435885).epsilon(1e-10));
    CHECK(r2.p_value == Approx(0.09942494579333945).epsilon(1e-9));

    const std::vector<std::vector<double>> three = {{5, 5, 5, 7}, {5, 8, 8, 9}, {6, 6, 10, 10}};
    const auto r3 = stats::kruskal_wallis(three);
    CHECK(r3.statistic == Approx(4.2005494505494525).epsilon(1e-10));
    CHECK(r3.df == 2);
    CHECK(r3.p_value == Approx(0.12242279099780173).epsilon(1e-9));
}

TEST_CASE("kruskal_wallis error paths") {
    const std::vector<std::vector<double>> identical = {{5, 5, 5}, {5, 5}};
    CHECK_THROWS_AS(stats::kruskal_wallis(identical), DegenerateData);

    const std::vector<std::vector<double>> one_group = {{1, 2, 3}};
    CHECK_THROWS_AS(stats::kruskal_wallis(one_group), InvalidArgument);

    const std::vector<std::vector<double>> with_empty = {{1, 2}, {}};
    CHECK_THROWS_AS(stats::kruskal_wallis(with_empty), InvalidArgument);

    const std::vector<std::vector<double>> too_small = {{1}, {2}};
    CHECK_THROWS_AS(stats::kruskal_wallis(too_small), InvalidArgument);
}

TEST_CASE("kruskal_wallis monotone-transform invariance") {
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> value(-3.0, 3.0);
    std::uniform_int_distribution<std::size_t> group_count(2, 4), group_size(1, 12);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<std::vector<double>> groups(group_count(rng));
        std::size_t total = 0;
        for (auto& g : groups) {
            const std::size_t n = group_size(rng);
            for (std::size_t i = 0; i < n; ++i) g.push_back(value(rng));
            total += n;
        }
        if (total < 3) continue;
        std::vector<std::vector<double>> transformed = groups;
        for (auto& g : transformed) {
            for (double& v : g) v = std::exp(v);
        }
        const auto plain = stats::kruskal_wallis(groups);
        const auto exped = stats::kruskal_wallis(transformed);
        CHECK(exped.statistic == Approx(plain.statistic).epsilon(1e-12));
    }
}

TEST_CASE("mann_whitney_u exact goldens") {
    const std::vector<double> a = {1, 2}, b = {3, 4};
    const auto small = stats::mann_whitney_u(a, b);
    CHECK(small.statistic == Approx(0.0));
    CHECK(small.p_value == Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(small.method == "mann-whitney-u/exact");
    CHECK(*small.effect_size == Approx(1.0)); // rank-biserial at U = 0

    const std::vector<double> lo = {1, 2, 3, 4, 5}, hi = {6, 7, 8, 9, 10};
    const auto sep = stats::mann_whitney_u(lo, hi);
    CHECK(sep.statistic == Approx(0.0));
    CHECK(sep.p_value == Approx(2.0 / 252.0).epsilon(1e-12));
}

TEST_CASE("mann_whitney_u identical lists") {
    const std::vector<double> a = {1, 2, 3, 4};
    const auto result = stats::mann_whitney_u(a, a);
    CHECK(result.statistic == Approx(8.0)); // n^2 / 2
    CHECK(result.p_value == Approx(1.0));
    CHECK(result.method == "mann-whitney-u/normal"); // ties disable the exact path
}

TEST_CASE("mann_whitney_u exact path matches full enumeration (sizes <= 6)") {
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> value(0.0, 1.0);
    for (std::size_t n1 = 1; n1 <= 6; ++n1) {
        for (std::size_t n2 = 1; n2 <= 6; ++n2) {
            for (int rep = 0; rep < 4; ++rep) {
                std::vector<double> a, b;
                for (std::size_t i = 0; i < n1; ++i) a.push_back(value(rng));
                for (std::size_t i = 0; i < n2; ++i) b.push_back(value(rng));
                const auto got = stats::mann_whitney_u(a, b);
                const auto want = oracles::ref_mann_whitney_exact(a, b);
                CHECK(got.statistic == Approx(want.u).epsilon(1e-12));
                CHECK(got.p_value == Approx(want.p).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("mann_whitney_u tie-corrected normal path against frozen reference") {
    const std::vector<double> a = {1, 2, 2, 3, 5, 5, 7, 8, 8, 9, 11, 12};
    const std::vector<double> b = {2, 3, 3, 5, 6, 8, 9, 9, 10, 13, 14, 15};
    const auto result = stats::mann_whitney_u(a, b);
    CHECK(result.method == "mann-whitney-u/normal");
    CHECK(result.statistic == Approx(51.0));
    CHECK(result.p_value == Approx(0.23453892257330478).epsilon(1e-9));
}

TEST_CASE("mann_whitney_u large samples use the normal approximation") {
    std::vector<double> a, b;
    for (int i = 0; i < 30; ++i) a.push_back(i);
    for (int i = 0; i < 30; ++i) b.push_back(i + 5.5);
    const auto result = stats::mann_whitney_u(a, b);
    CHECK(result.method == "mann-whitney-u/normal");
    CHECK(result.p_value < 0.05);
    CHECK(result.p_value > 0.0);
    CHECK_THROWS_AS(stats::mann_whitney_u(std::vector<double>{}, a), InvalidArgument);
}

TEST_CASE("holm_correct") {
    const std::vector<double> fixture = {0.01, 0.04, 0.03};
    const auto adjusted = stats::holm_correct(fixture);
    REQUIRE(adjusted.size() == 3);
    CHECK(adjusted[0] == Approx(0.03).epsilon(1e-15));
    CHECK(adjusted[1] == Approx(0.06).epsilon(1e-15));
    CHECK(adjusted[2] == Approx(0.06).epsilon(1e-15));

    CHECK(stats::holm_correct(std::vector<double>{0.2}) == std::vector<double>{0.2});
    CHECK(stats::holm_correct(std::vector<double>{1.0, 1.0}) == std::vector<double>{1.0, 1.0});
    CHECK(stats::holm_correct(std::vector<double>{}).empty());
    CHECK_THROWS_AS(stats::holm_correct(std::vector<double>{0.5, 1.5}), InvalidArgument);
    CHECK_THROWS_AS(stats::holm_correct(std::vector<double>{-0.1}), InvalidArgument);
}

TEST_CASE("holm_correct properties") {
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> p_dist(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> ps;
        std::uniform_int_distribution<std::size_t> m_dist(1, 12);
        const std::size_t m = m_dist(rng);
        for (std::size_t i = 0; i < m; ++i) ps.push_back(p_dist(rng));
        const auto adjusted = stats::holm_correct(ps);
        for (std::size_t i = 0; i < m; ++i) {
            CHECK(adjusted[i] >= ps[i]); // never below raw
            CHECK(adjusted[i] <= 1.0);
        }
        // monotone when input was sorted
        std::vector<double> sorted = ps;
        std::sort(sorted.begin(), sorted.end());
        const auto sorted_adjusted = stats::holm_correct(sorted);
        for (std::size_t i = 1; i < m; ++i) {
            CHECK(sorted_adjusted[i] >= sorted_adjusted[i - 1]);
        }
    }
}

TEST_CASE("pearson_r") {
    const std::vector<double> x = {1, 2, 3, 4, 5};
    std::vector<double> y;
    for (double v : x) y.push_back(2 * v + 1);
    CHECK(stats::pearson_r(x, y) == Approx(1.0));
    for (double& v : y) v = -v;
    CHECK(stats::pearson_r(x, y) == Approx(-1.0));

    CHECK(stats::pearson_r(std::vector<double>{1, 2, 3}, std::vector<double>{1, 3, 2}) ==
          Approx(0.5).epsilon(1e-12));

    CHECK_THROWS_AS(stats::pearson_r(std::vector<double>{1, 1, 1}, std::vector<double>{1, 2, 3}),
                    DegenerateData);
    CHECK_THROWS_AS(stats::pearson_r(std::vector<double>{1}, std::vector<double>{2}),
                    InvalidArgument);
    CHECK_THROWS_AS(stats::pearson_r(x, std::vector<double>{1, 2}), InvalidArgument);
}

TEST_CASE("pearson_r affine invariance") {
    std::mt19937 rng(123);
    std::uniform_real_distribution<double> value(-5.0, 5.0);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> x, y;
        for (int i = 0; i < 20; ++i) {
            x.push_back(value(rng));
            y.push_back(value(rng));
        }
        const double r = stats::pearson_r(x, y);
        std::vector<double> scaled;
        for (double v : x) scaled.push_back(3.5 * v + 7.0);
        CHECK(stats::pearson_r(scaled, y) == Approx(r).epsilon(1e-9));
        for (double& v : scaled) v = -v;
        CHECK(stats::pearson_r(scaled, y) == Approx(-r).epsilon(1e-9));
    }
}

TEST_CASE("kde_density symmetry and normalization") {
    std::vector<double> values;
    for (int i = 0; i < 50; ++i) {
        values.push_back(-1.0);
        values.push_back(1.0);
    }
    const auto curve = stats::kde_density(values);
    REQUIRE(curve.xs.size() == 256);
    for (std::size_t i = 0; i < curve.xs.size(); ++i) {
        const std::size_t j = curve.xs.size() - 1 - i;
        CHECK(curve.ys[i] == Approx(curve.ys[j]).epsilon(1e-9));
    }
    double integral = 0.0;
    for (std::size_t i = 1; i < curve.xs.size(); ++i) {
        integral += 0.5 * (curve.ys[i] + curve.ys[i - 1]) * (curve.xs[i] - curve.xs[i - 1]);
    }
    CHECK(integral == Approx(1.0).epsilon(1e-3));
    CHECK(curve.bandwidth > 0.0);
}

TEST_CASE("kde_density integral on random data") {
    std::mt19937 rng(77);
    std::uniform_real_distribution<double> value(-10.0, 10.0);
    std::uniform_int_distribution<std::size_t> n_dist(2, 200);
    for (int trial = 0; trial < 40; ++trial) {
        std::vector<double> values;
        const std::size_t n = n_dist(rng);
        for (std::size_t i = 0; i < n; ++i) values.push_back(value(rng));
        if (std::all_of(values.begin(), values.end(),
                        [&](double v) { return v == values[0]; })) {
            continue;
        }
        const auto curve = stats::kde_density(values);
        double integral = 0.0;
        for (std::size_t i = 1; i < curve.xs.size(); ++i) {
            integral += 0.5 * (curve.ys[i] + curve.ys[i - 1]) * (curve.xs[i] - curve.xs[i - 1]);
        }
        CHECK(integral >= 0.999);
        CHECK(integral <= 1.001);
        for (double y : curve.ys) CHECK(y >= 0.0);
    }
}

TEST_CASE("kde_density mode against histogram oracle") {
    std::mt19937 rng(314159);
    const std::vector<double> draws = oracles::normal_draws(rng, 1000);
    const auto curve = stats::kde_density(draws);
    std::size_t argmax = 0;
    for (std::size_t i = 1; i < curve.ys.size(); ++i) {
        if (curve.ys[i] > curve.ys[argmax]) argmax = i;
    }
    const double kde_mode = curve.xs[argmax];
    CHECK(std::fabs(kde_mode) < 0.15);

    // histogram oracle: max-count bin center should sit near the KDE mode
    const double lo = *std::min_element(draws.begin(), draws.end());
    const double hi = *std::max_element(draws.begin(), draws.end());
    const std::size_t bins = 40;
    std::vector<std::size_t> counts(bins, 0);
    for (double v : draws) {
        auto b = static_cast<std::size_t>((v - lo) / (hi - lo) * bins);
        if (b >= bins) b = bins - 1;
        ++counts[b];
    }
    const std::size_t best =
        std::distance(counts.begin(), std::max_element(counts.begin(), counts.end()));
    const double hist_mode = lo + (static_cast<double>(best) + 0.5) * (hi - lo) / bins;
    CHECK(std::fabs(kde_mode - hist_mode) < 0.3);
}

TEST_CASE("kde_density Silverman bandwidth against frozen reference") {
    const std::vector<double> values = {1.0, 2.0, 4.0, 4.5, 7.0, 9.0, 11.5, 13.0};
    const auto curve = stats::kde_density(values);
    // 0.9 * min(sd, IQR/1.34) * n^(-1/5) with sd = 4.38341..., IQR = 6.125
    CHECK(curve.bandwidth == Approx(2.602775045412331).epsilon(1e-12));
    CHECK(curve.xs.front() == Approx(1.0 - 3.0 * curve.bandwidth).epsilon(1e-12));
    CHECK(curve.xs.back() == Approx(13.0 + 3.0 * curve.bandwidth).epsilon(1e-12));
}

TEST_CASE("kde_density degenerate inputs") {
    CHECK_THROWS_AS(stats::kde_density(std::vector<double>{1.0}), DegenerateData);
    CHECK_THROWS_AS(stats::kde_density(std::vector<double>{2.0, 2.0, 2.0}), DegenerateData);
    CHECK_THROWS_AS(stats::kde_density(std::vector<double>{1.0, 2.0}, 1), InvalidArgument);
    // IQR = 0 but data not constant: sd fallback keeps the curve sane
    std::vector<double> spiky(99, 5.0);
    spiky.push_back(6.0);
    const auto curve = stats::kde_density(spiky);
    double integral = 0.0;
    for (std::size_t i = 1; i < curve.xs.size(); ++i) {
        integral += 0.5 * (curve.ys[i] + curve.ys[i - 1]) * (curve.xs[i] - curve.xs[i - 1]);
    }
    CHECK(integral == Approx(1.0).epsilon(1e-3));
}

TEST_CASE("describe and quantile") {
    const std::vector<double> values = {4, 1, 3, 2};
    const auto d = stats::describe(values);
    CHECK(d.min == 1);
    CHECK(d.max == 4);
    CHECK(d.median == Approx(2.5));
    CHECK(d.q1 == Approx(1.75));
    CHECK(d.q3 == Approx(3.25));
    CHECK(d.mean == Approx(2.5));
    CHECK(d.sd == Approx(std::sqrt(5.0 / 3.0)).epsilon(1e-12));

    const std::vector<double> single = {7};
    const auto ds = stats::describe(single);
    CHECK(ds.min == 7);
    CHECK(ds.sd == 0.0);
    CHECK_THROWS_AS(stats::describe(std::vector<double>{}), InvalidArgument);
}
