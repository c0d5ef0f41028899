#pragma once

// Statistical utilities: KS distances, discrete total variation, Poisson
// pmf / tails / tail bounds, and the reference laws the fluctuation
// experiments are compared against.

#include <cstdint>
#include <span>
#include <vector>

namespace cubeperc {

/// Empirical mean and unbiased variance.
struct SampleMoments {
    std::uint64_t n = 0;
    double mean = 0.0;
    double variance = 0.0;  ///< unbiased
    double std_error() const;
};

SampleMoments sample_moments(std::span<const double> xs);

/// Unbiased sample covariance.
double sample_covariance(std::span<const double> xs, std::span<const double> ys);

double std_normal_cdf(double x);

/// P(e^{s W1} + e^{s W2} <= x) for W1, W2 i.i.d. N(0,1) and s = lambda / sqrt(2).
/// Adaptive Gauss-Kronrod quadrature, absolute accuracy ~1e-6.
double lognormal_sum_cdf(double x, double lambda);

class ReferenceDistribution {
  public:
    enum class Kind { StdNormal, LogNormalSum, Poisson };

    static ReferenceDistribution std_normal();
    static ReferenceDistribution lognormal_sum(double lambda);
    static ReferenceDistribution poisson(double theta);

    Kind kind() const noexcept { return kind_; }
    double parameter() const noexcept { return param_; }
    bool continuous() const noexcept { return kind_ != Kind::Poisson; }

    double cdf(double x) const;
    /// Poisson only.
    double pmf(std::int64_t k) const;

  private:
    ReferenceDistribution(Kind k, double param) : kind_(k), param_(param) {}
    Kind kind_;
    double param_;
};

inline constexpr std::size_t kMinKsSamples = 50;

/// sup |F_n - F|; sorts a copy of the samples. Throws DomainError for fewer
/// than 50 samples.
double ks_statistic(std::span<const double> samples, const ReferenceDistribution& ref);
double ks_two_sample(std::span<const double> a, std::span<const double> b);

/// Half the l1 distance between pmfs on {0, 1, ...}; the shorter one is
/// padded with zeros. Throws DomainError on negative or non-finite masses.
double tv_discrete(std::span<const double> p, std::span<const double> q);

double poisson_log_pmf(double theta, std::int64_t k);
double poisson_pmf(double theta, std::int64_t k);

/// Truncation point theta + 20 sqrt(theta) + 50.
std::int64_t poisson_truncation(double theta);
/// pmf on 0..poisson_truncation(theta).
std::vector<double> poisson_pmf_vector(double theta);
std::vector<double> poisson_pmf_vector(double theta, std::size_t length);

enum class TailSide { Upper, Lower, TwoSided };

struct TailBound {
    double value = 1.0;
    bool applicable = true;
};

/// 4 eta / (1 + 6 eta + 8 eta^2).
double lower_tail_constant(double eta);

/// Chernoff-type bounds on P(X > theta + t sqrt(theta)), P(X < theta - t sqrt(theta))
/// and P(|X - theta| > t sqrt(theta)) for X ~ Poisson(theta). `eta` applies to
/// the lower bound; the two-sided bound uses eta = 1/6 and requires
/// t <= min(c_{1/6}, 1/3) sqrt(theta).
TailBound poisson_tail_bound(double theta, double t, TailSide side, double eta = 1.0 / 6.0);

/// Exact tail probabilities by pmf summation (strict inequalities).
double poisson_tail_exact(double theta, double t, TailSide side);

struct PoissonTv {
    double value = 0.0;
    /// Upper bound on the Poisson mass both pmfs leave beyond the truncation.
    double truncation_error = 0.0;
};

PoissonTv poisson_tv_exact(double theta1, double theta2);
/// |sqrt(theta1) - sqrt(theta2)| (universal constant taken as 1).
double poisson_tv_bound(double theta1, double theta2);

/// Normalized histogram of nonnegative integer observations.
std::vector<double> empirical_pmf(std::span<const std::uint64_t> values);

}  // namespace cubeperc
