#pragma once

// Defect weights phi_v = lambda (1 + lambda)^(-N_p(v)), their parity-class
// sums, and the closed-form constants that describe them.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cubeperc/hypercube.hpp"

namespace cubeperc {

enum class Regime : std::uint8_t { Supercritical, Critical };

const char* to_string(Regime r) noexcept;
Regime parse_regime(const std::string& s);

struct ModelParams {
    int d = 0;
    double p = 0.0;
    double lambda = 1.0;
    Regime regime = Regime::Supercritical;
};

/// Validates lambda > 0, the dimension, and the regime/p consistency
/// (Critical: |p - p_c| < 1e-12; Supercritical: p > p_c). Throws DomainError.
ModelParams make_params(int d, double p, double lambda, Regime regime);

/// Params at the critical point p_c(lambda).
ModelParams critical_params(int d, double lambda);

inline constexpr double kWindowExponent = 0.6;

struct TheoryConstants {
    double mu = 0.0;
    double sigma_sq = 0.0;
    double zeta = 1.0;
    double p_crit = 0.0;
    std::int64_t window_lo = 0;
    std::int64_t window_hi = 0;
    /// Cov(Phi_Even, Phi_Odd); only derived for lambda = 1.
    std::optional<double> cov;

    double sigma() const;
};

TheoryConstants make_constants(const ModelParams& params, double window_exponent = kWindowExponent);
nlohmann::ordered_json to_json(const TheoryConstants& c);
nlohmann::ordered_json to_json(const ModelParams& m);

struct PhiPair {
    double phi_even = 0.0;
    double phi_odd = 0.0;
};

/// Weight of a vertex with the given open degree.
double degree_weight(int degree, double lambda);

double vertex_weight(const PercolationInstance& inst, Vertex v, double lambda);

/// Power sums sum_v phi_v^k, k = 1..3, of one side. The side is summed through
/// its degree histogram (exact integer counts times d + 1 distinct weights).
struct SidePowerSums {
    double s1 = 0.0;
    double s2 = 0.0;
    double s3 = 0.0;
};

/// Count of vertices of each open degree 0..d on one side.
std::vector<std::uint64_t> degree_histogram(const PercolationInstance& inst, Parity side);

SidePowerSums side_power_sums(const PercolationInstance& inst, Parity side, double lambda);

inline constexpr int kPhiSweepMaxDim = 28;

/// Throws DimensionError for d > 28.
PhiPair phi_sums(const PercolationInstance& inst, double lambda);

double mu_theory(int d, double p, double lambda = 1.0);
double sigma_sq_theory(int d, double p, double lambda = 1.0);
/// Throws UnsupportedError for lambda != 1.
double cov_theory(int d, double p, double lambda = 1.0);
/// E[phi_v^k]; throws DomainError for k < 1.
double moment_theory(int d, double p, double lambda, int k);
/// (1 + lambda)^2 / (2 lambda (2 + lambda)); throws FugacityError for lambda <= sqrt(2) - 1.
double critical_p(double lambda);
double zeta(const ModelParams& params);

/// (ceil(mu - mu^e), floor(mu + mu^e)).
std::pair<std::int64_t, std::int64_t> window_bounds(double mu, double exponent = kWindowExponent);

/// (e^{phi_even - mu} + e^{phi_odd - mu} - 2) / (sqrt(2) sigma), via expm1.
double clt_statistic(const PhiPair& phis, const TheoryConstants& consts);
/// e^{phi_even - mu} + e^{phi_odd - mu}.
double critical_statistic(const PhiPair& phis, const TheoryConstants& consts);

/// Neumaier-compensated running sum.
class CompensatedSum {
  public:
    void add(double x) noexcept;
    double value() const noexcept { return sum_ + comp_; }

  private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

}  // namespace cubeperc
