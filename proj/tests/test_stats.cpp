#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "cubeperc/errors.hpp"
#include "cubeperc/rng.hpp"
#include "cubeperc/stats.hpp"

using namespace cubeperc;
using doctest::Approx;

TEST_CASE("sample moments") {
    const std::vector<double> xs{1, 2, 3, 4};
    const auto m = sample_moments(xs);
    CHECK(m.n == 4);
    CHECK(m.mean == 2.5);
    CHECK(m.variance == Approx(5.0 / 3.0));
    CHECK(m.std_error() == Approx(std::sqrt(5.0 / 12.0)));
    const std::vector<double> ys{2, 4, 6, 8};
    CHECK(sample_covariance(xs, ys) == Approx(10.0 / 3.0));
}

TEST_CASE("standard normal cdf") {
    CHECK(std_normal_cdf(0.0) == 0.5);
    CHECK(std_normal_cdf(1.959963984540054) == Approx(0.975).epsilon(1e-12));
    CHECK(std_normal_cdf(-8.0) == Approx(6.22096057427e-16).epsilon(1e-9));
}

TEST_CASE("log-normal sum cdf matches adaptive quadrature") {
    // Reference values from scipy.integrate.quad.
    CHECK(lognormal_sum_cdf(2.0, 1.0) == Approx(0.4167132503072436).epsilon(1e-9));
    CHECK(lognormal_sum_cdf(1.0, 1.0) == Approx(0.05948487114496805).epsilon(1e-9));
    CHECK(lognormal_sum_cdf(3.0, 1.0) == Approx(0.7153262336281451).epsilon(1e-9));
    CHECK(lognormal_sum_cdf(2.0, 2.0) == Approx(0.37039059652488404).epsilon(1e-9));
    CHECK(lognormal_sum_cdf(5.0, 2.0) == Approx(0.6964802389202328).epsilon(1e-9));
    CHECK(lognormal_sum_cdf(0.0, 1.0) == 0.0);
    CHECK(lognormal_sum_cdf(1e6, 1.0) == Approx(1.0).epsilon(1e-9));

    double prev = 0.0;
    for (double x = 0.05; x < 20.0; x += 0.05) {
        const double f = lognormal_sum_cdf(x, 1.0);
        CHECK(f >= prev - 1e-12);
        prev = f;
    }
}

TEST_CASE("ks statistic against the continuous reference") {
    std::vector<double> xs;
    Xoshiro256ss rng(5);
    // Inverse-cdf normal samples via bisection keep the test self-contained.
    for (int i = 0; i < 2000; ++i) {
        const double u = uniform01(rng);
        double lo = -10, hi = 10;
        for (int it = 0; it < 80; ++it) {
            const double mid = 0.5 * (lo + hi);
            (std_normal_cdf(mid) < u ? lo : hi) = mid;
        }
        xs.push_back(lo);
    }
    CHECK(ks_statistic(xs, ReferenceDistribution::std_normal()) < 0.04);
    for (double& x : xs) x += 0.5;
    CHECK(ks_statistic(xs, ReferenceDistribution::std_normal()) > 0.15);

    std::vector<double> few(10, 0.0);
    CHECK_THROWS_AS(ks_statistic(few, ReferenceDistribution::std_normal()), DomainError);
}

TEST_CASE("ks statistic on discrete samples uses the left limit") {
    // All mass at 0 against Poisson(theta): the sup is at the jump.
    std::vector<double> zeros(100, 0.0);
    const auto ref = ReferenceDistribution::poisson(1.0);
    CHECK(ks_statistic(zeros, ref) == Approx(1.0 - std::exp(-1.0)));
}

TEST_CASE("two-sample ks") {
    std::vector<double> a{1, 2, 3, 4, 5}, b{1, 2, 3, 4, 5}, c{6, 7, 8, 9, 10};
    CHECK(ks_two_sample(a, b) == 0.0);
    CHECK(ks_two_sample(a, c) == 1.0);
}

TEST_CASE("total variation of discrete vectors") {
    const std::vector<double> p{0.5, 0.5}, q{0.25, 0.25, 0.5};
    CHECK(tv_discrete(p, q) == Approx(0.5));
    CHECK(tv_discrete(p, p) == 0.0);
}

TEST_CASE("poisson pmf and truncation") {
    CHECK(poisson_pmf(2.0, 0) == Approx(std::exp(-2.0)));
    CHECK(poisson_pmf(2.0, 3) == Approx(std::exp(-2.0) * 8.0 / 6.0));
    CHECK(poisson_pmf(2.0, -1) == 0.0);
    for (double theta : {0.1, 1.0, 30.0, 500.0}) {
        const auto v = poisson_pmf_vector(theta);
        double s = 0;
        for (double x : v) s += x;
        CHECK(s == Approx(1.0).epsilon(1e-12));
        CHECK(static_cast<std::int64_t>(v.size()) == poisson_truncation(theta) + 1);
    }
}

TEST_CASE("poisson tails match the exact sums") {
    // Reference values from scipy.stats.poisson with strict inequalities.
    struct Row {
        double theta, t, upper, lower;
    };
    const Row rows[] = {
        {10, 1, 0.13553557738068908, 0.130141420882483},
        {10, 2, 0.027041609784801086, 0.010336050675925726},
        {10, 3, 0.0034543419758568334, 4.539992976248486e-05},
        {100, 1, 0.1471373484422697, 0.14634617469873273},
        {100, 2, 0.022669329078352663, 0.01745132251627543},
        {100, 3, 0.0017068403705014943, 0.0006608831301573681},
        {1000, 1, 0.15957671284009134, 0.15959646416148368},
        {1000, 2, 0.023155123143028204, 0.021456668685511368},
        {1000, 3, 0.001597949721118622, 0.0012146255079465884},
    };
    for (const auto& r : rows) {
        CHECK(poisson_tail_exact(r.theta, r.t, TailSide::Upper) == Approx(r.upper).epsilon(1e-10));
        CHECK(poisson_tail_exact(r.theta, r.t, TailSide::Lower) == Approx(r.lower).epsilon(1e-10));
        CHECK(poisson_tail_exact(r.theta, r.t, TailSide::TwoSided) == Approx(r.upper + r.lower).epsilon(1e-10));
    }
}

TEST_CASE("poisson tail bounds dominate the exact tails where they apply") {
    for (double theta : {10.0, 100.0, 1000.0}) {
        for (double t : {0.5, 1.0, 2.0, 3.0}) {
            const auto up = poisson_tail_bound(theta, t, TailSide::Upper);
            CHECK(up.applicable);
            CHECK(poisson_tail_exact(theta, t, TailSide::Upper) <= up.value);
            const auto lo = poisson_tail_bound(theta, t, TailSide::Lower);
            if (lo.applicable) CHECK(poisson_tail_exact(theta, t, TailSide::Lower) <= lo.value);
            const auto two = poisson_tail_bound(theta, t, TailSide::TwoSided);
            if (two.applicable) CHECK(poisson_tail_exact(theta, t, TailSide::TwoSided) <= two.value);
        }
    }
    CHECK_FALSE(poisson_tail_bound(1.0, 100.0, TailSide::Lower).applicable);
}

TEST_CASE("poisson total variation") {
    // Reference values from a direct summation with mpmath.
    const auto a = poisson_tv_exact(1.0, 2.0);
    CHECK(a.value == Approx(0.3297530326330465).epsilon(1e-12));
    CHECK(a.truncation_error < 1e-12);
    CHECK(poisson_tv_exact(1.0, 1.21).value == Approx(0.07674289480283353).epsilon(1e-12));
    CHECK(poisson_tv_exact(3.0, 3.0).value == 0.0);
    for (double t1 : {0.5, 5.0, 50.0})
        for (double t2 : {0.6, 6.0, 60.0})
            CHECK(poisson_tv_exact(t1, t2).value <= poisson_tv_bound(t1, t2) + 1e-12);
}

TEST_CASE("empirical pmf") {
    const std::vector<std::uint64_t> v{0, 0, 1, 3};
    const auto pmf = empirical_pmf(v);
    REQUIRE(pmf.size() == 4);
    CHECK(pmf[0] == 0.5);
    CHECK(pmf[1] == 0.25);
    CHECK(pmf[2] == 0.0);
    CHECK(pmf[3] == 0.25);
}

TEST_CASE("poisson total variation obeys the coupling bound") {
    for (int i = 1; i <= 20; ++i) {
        const double t1 = 0.25 * i;
        const double t2 = 0.7 * i + 0.1;
        CHECK(poisson_tv_exact(t1, t2).value <= std::min(1.0, std::fabs(t1 - t2)) + 1e-12);
    }
}

TEST_CASE("tv_discrete is a metric on random pmfs") {
    Xoshiro256ss rng(31);
    auto random_pmf = [&](std::size_t n) {
        std::vector<double> v(n);
        double s = 0;
        for (auto& x : v) s += (x = uniform01(rng));
        for (auto& x : v) x /= s;
        return v;
    };
    for (int rep = 0; rep < 200; ++rep) {
        const auto a = random_pmf(6), b = random_pmf(8), c = random_pmf(5);
        CHECK(tv_discrete(a, b) >= 0.0);
        CHECK(tv_discrete(a, b) == doctest::Approx(tv_discrete(b, a)).epsilon(1e-15));
        CHECK(tv_discrete(a, c) <= tv_discrete(a, b) + tv_discrete(b, c) + 1e-15);
    }
}

TEST_CASE("log-normal sum cdf matches a Monte Carlo cdf") {
    // X = e^{sW1} + e^{sW2}, W standard normal, s^2 = lambda^2 / 2.
    const double lambda = 1.0;
    const double s = lambda / std::sqrt(2.0);
    Xoshiro256ss rng(2024);
    const int n = 1000000;
    std::vector<double> xs(n);
    for (auto& x : xs) {
        const double u1 = uniform01(rng), u2 = uniform01(rng);
        const double r = std::sqrt(-2.0 * std::log1p(-u1));
        x = std::exp(s * r * std::cos(2 * M_PI * u2)) + std::exp(s * r * std::sin(2 * M_PI * u2));
    }
    std::sort(xs.begin(), xs.end());
    for (int q = 1; q <= 20; ++q) {
        const std::size_t idx = static_cast<std::size_t>(q * (n / 21));
        const double emp = static_cast<double>(idx + 1) / n;
        CHECK(std::fabs(lognormal_sum_cdf(xs[idx], lambda) - emp) < 2e-3);
    }
}
