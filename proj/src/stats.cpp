#include "cubeperc/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "cubeperc/errors.hpp"
#include "cubeperc/weights.hpp"

namespace cubeperc {

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014326779;

double std_normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

// Chernoff bound P(X >= T) <= e^{T - theta} (theta / T)^T for T > theta.
double chernoff_upper(double theta, double T) {
    if (T <= theta) return 1.0;
    return std::exp(T - theta - T * std::log(T / theta));
}

void check_theta(double theta) {
    if (!(theta > 0.0) || !std::isfinite(theta)) throw DomainError("Poisson mean must be positive");
}

}  // namespace

double SampleMoments::std_error() const {
    return n > 0 ? std::sqrt(variance / static_cast<double>(n)) : 0.0;
}

SampleMoments sample_moments(std::span<const double> xs) {
    SampleMoments m;
    m.n = xs.size();
    if (xs.empty()) return m;
    CompensatedSum s;
    for (double x : xs) s.add(x);
    m.mean = s.value() / static_cast<double>(xs.size());
    if (xs.size() > 1) {
        CompensatedSum ss;
        for (double x : xs) ss.add((x - m.mean) * (x - m.mean));
        m.variance = ss.value() / static_cast<double>(xs.size() - 1);
    }
    return m;
}

double sample_covariance(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size() || xs.size() < 2) throw DomainError("covariance needs two equal-length samples");
    const double mx = sample_moments(xs).mean;
    const double my = sample_moments(ys).mean;
    CompensatedSum s;
    for (std::size_t i = 0; i < xs.size(); ++i) s.add((xs[i] - mx) * (ys[i] - my));
    return s.value() / static_cast<double>(xs.size() - 1);
}

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double lognormal_sum_cdf(double x, double lambda) {
    if (!(lambda > 0.0)) throw DomainError("lognormal_sum_cdf needs lambda > 0");
    if (std::isnan(x)) return x;
    if (x <= 0.0) return 0.0;
    if (std::isinf(x)) return 1.0;
    const double s = lambda / std::numbers::sqrt2;
    const double b = std::log(x) / s;  // e^{s w} < x iff w < b
    auto integrand = [&](double w) {
        const double rest = x - std::exp(s * w);
        if (!(rest > 0.0)) return 0.0;
        return std_normal_pdf(w) * std_normal_cdf(std::log(rest) / s);
    };
    const double lo = std::min(-12.0, b - 12.0);
    const double hi = std::min(b, 12.0);
    if (!(hi > lo)) return 0.0;
    using boost::math::quadrature::gauss_kronrod;
    // Split off the last unit before b, where the inner CDF falls to zero.
    const double mid = std::max(lo, hi - 1.0);
    double total = 0.0;
    if (mid > lo) total += gauss_kronrod<double, 31>::integrate(integrand, lo, mid, 15, 1e-12);
    total += gauss_kronrod<double, 31>::integrate(integrand, mid, hi, 15, 1e-12);
    return std::clamp(total, 0.0, 1.0);
}

// --- ReferenceDistribution ---------------------------------------------------

ReferenceDistribution ReferenceDistribution::std_normal() { return {Kind::StdNormal, 0.0}; }

ReferenceDistribution ReferenceDistribution::lognormal_sum(double lambda) {
    if (!(lambda > 0.0)) throw DomainError("lognormal sum needs lambda > 0");
    return {Kind::LogNormalSum, lambda};
}

ReferenceDistribution ReferenceDistribution::poisson(double theta) {
    check_theta(theta);
    return {Kind::Poisson, theta};
}

double ReferenceDistribution::cdf(double x) const {
    switch (kind_) {
        case Kind::StdNormal:
            return std_normal_cdf(x);
        case Kind::LogNormalSum:
            return lognormal_sum_cdf(x, param_);
        case Kind::Poisson: {
            if (x < 0.0) return 0.0;
            const auto top = static_cast<std::int64_t>(std::floor(x));
            if (top > poisson_truncation(param_)) return 1.0;
            CompensatedSum s;
            for (std::int64_t k = 0; k <= top; ++k) s.add(poisson_pmf(param_, k));
            return std::min(1.0, s.value());
        }
    }
    return 0.0;
}

double ReferenceDistribution::pmf(std::int64_t k) const {
    if (kind_ != Kind::Poisson) throw UnsupportedError("pmf is defined for the Poisson reference only");
    return poisson_pmf(param_, k);
}

// --- KS ---------------------------------------------------------------------

double ks_statistic(std::span<const double> samples, const ReferenceDistribution& ref) {
    if (samples.size() < kMinKsSamples) throw DomainError("KS statistic needs at least 50 samples");
    std::vector<double> xs(samples.begin(), samples.end());
    std::sort(xs.begin(), xs.end());
    const auto n = static_cast<double>(xs.size());
    double dmax = 0.0;
    std::size_t i = 0;
    while (i < xs.size()) {
        std::size_t j = i;
        while (j < xs.size() && xs[j] == xs[i]) ++j;
        const double below = static_cast<double>(i) / n;  // F_n just left of xs[i]
        const double at = static_cast<double>(j) / n;     // F_n at xs[i]
        const double f_at = ref.cdf(xs[i]);
        const double f_left = ref.continuous() ? f_at : ref.cdf(std::ceil(xs[i]) - 1.0);
        dmax = std::max({dmax, std::fabs(at - f_at), std::fabs(below - f_left)});
        i = j;
    }
    return dmax;
}

double ks_two_sample(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw DomainError("two-sample KS needs nonempty samples");
    std::vector<double> xs(a.begin(), a.end()), ys(b.begin(), b.end());
    std::sort(xs.begin(), xs.end());
    std::sort(ys.begin(), ys.end());
    const auto na = static_cast<double>(xs.size());
    const auto nb = static_cast<double>(ys.size());
    std::size_t i = 0, j = 0;
    double dmax = 0.0;
    while (i < xs.size() && j < ys.size()) {
        const double v = std::min(xs[i], ys[j]);
        while (i < xs.size() && xs[i] == v) ++i;
        while (j < ys.size() && ys[j] == v) ++j;
        dmax = std::max(dmax, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return dmax;
}

// --- discrete TV ---------------------------------------------------------------

double tv_discrete(std::span<const double> p, std::span<const double> q) {
    const std::size_t n = std::max(p.size(), q.size());
    CompensatedSum s;
    for (std::size_t k = 0; k < n; ++k) {
        const double a = k < p.size() ? p[k] : 0.0;
        const double b = k < q.size() ? q[k] : 0.0;
        if (!(a >= 0.0) || !(b >= 0.0) || !std::isfinite(a) || !std::isfinite(b))
            throw DomainError("pmf masses must be finite and nonnegative");
        s.add(std::fabs(a - b));
    }
    return 0.5 * s.value();
}

// --- Poisson ----------------------------------------------------------------

double poisson_log_pmf(double theta, std::int64_t k) {
    check_theta(theta);
    if (k < 0) return -INFINITY;
    const auto kd = static_cast<double>(k);
    return kd * std::log(theta) - theta - std::lgamma(kd + 1.0);
}

double poisson_pmf(double theta, std::int64_t k) { return std::exp(poisson_log_pmf(theta, k)); }

std::int64_t poisson_truncation(double theta) {
    check_theta(theta);
    return static_cast<std::int64_t>(std::ceil(theta + 20.0 * std::sqrt(theta) + 50.0));
}

std::vector<double> poisson_pmf_vector(double theta) {
    return poisson_pmf_vector(theta, static_cast<std::size_t>(poisson_truncation(theta)) + 1);
}

std::vector<double> poisson_pmf_vector(double theta, std::size_t length) {
    std::vector<double> out(length);
    for (std::size_t k = 0; k < length; ++k) out[k] = poisson_pmf(theta, static_cast<std::int64_t>(k));
    return out;
}

double lower_tail_constant(double eta) {
    if (!(eta > 0.0)) throw DomainError("eta must be positive");
    return 4.0 * eta / (1.0 + 6.0 * eta + 8.0 * eta * eta);
}

TailBound poisson_tail_bound(double theta, double t, TailSide side, double eta) {
    check_theta(theta);
    if (!(t > 0.0)) throw DomainError("tail deviation t must be positive");
    const double rt = std::sqrt(theta);
    switch (side) {
        case TailSide::Upper:
            return {std::exp(-t * t / 2.0 + t * t * t / (2.0 * rt)), true};
        case TailSide::Lower: {
            const double v = std::exp(-(0.5 - eta) * t * t - (0.5 + eta) * t * t * t / rt);
            return {v, t <= lower_tail_constant(eta) * rt};
        }
        case TailSide::TwoSided: {
            const double limit = std::min(lower_tail_constant(1.0 / 6.0), 1.0 / 3.0) * rt;
            return {2.0 * std::exp(-t * t / 3.0), t <= limit};
        }
    }
    return {};
}

double poisson_tail_exact(double theta, double t, TailSide side) {
    check_theta(theta);
    const double rt = std::sqrt(theta);
    const std::int64_t top = poisson_truncation(theta);
    CompensatedSum s;
    if (side != TailSide::Lower) {
        const auto first = static_cast<std::int64_t>(std::floor(theta + t * rt)) + 1;
        for (std::int64_t k = std::max<std::int64_t>(first, 0); k <= top; ++k) s.add(poisson_pmf(theta, k));
    }
    if (side != TailSide::Upper) {
        const auto last = static_cast<std::int64_t>(std::ceil(theta - t * rt)) - 1;
        for (std::int64_t k = 0; k <= last; ++k) s.add(poisson_pmf(theta, k));
    }
    return s.value();
}

PoissonTv poisson_tv_exact(double theta1, double theta2) {
    check_theta(theta1);
    check_theta(theta2);
    const std::int64_t top = std::max(poisson_truncation(theta1), poisson_truncation(theta2));
    CompensatedSum s;
    for (std::int64_t k = 0; k <= top; ++k) s.add(std::fabs(poisson_pmf(theta1, k) - poisson_pmf(theta2, k)));
    const auto beyond = static_cast<double>(top + 1);
    return {0.5 * s.value(), chernoff_upper(theta1, beyond) + chernoff_upper(theta2, beyond)};
}

double poisson_tv_bound(double theta1, double theta2) {
    check_theta(theta1);
    check_theta(theta2);
    return std::fabs(std::sqrt(theta1) - std::sqrt(theta2));
}

std::vector<double> empirical_pmf(std::span<const std::uint64_t> values) {
    if (values.empty()) return {};
    const auto top = *std::max_element(values.begin(), values.end());
    std::vector<double> pmf(static_cast<std::size_t>(top) + 1, 0.0);
    for (auto v : values) pmf[static_cast<std::size_t>(v)] += 1.0;
    for (auto& x : pmf) x /= static_cast<double>(values.size());
    return pmf;
}

}  // namespace cubeperc
