#include "cubeperc/weights.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace cubeperc {

namespace {

constexpr double kCriticalTolerance = 1e-12;

void check_lambda(double lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw DomainError("fugacity lambda must be positive");
}

}  // namespace

const char* to_string(Regime r) noexcept {
    return r == Regime::Critical ? "critical" : "supercritical";
}

Regime parse_regime(const std::string& s) {
    if (s == "critical") return Regime::Critical;
    if (s == "supercritical") return Regime::Supercritical;
    throw DomainError("unknown regime '" + s + "' (expected supercritical|critical)");
}

void CompensatedSum::add(double x) noexcept {
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x))
        comp_ += (sum_ - t) + x;
    else
        comp_ += (x - t) + sum_;
    sum_ = t;
}

ModelParams make_params(int d, double p, double lambda, Regime regime) {
    CubeDim{d};
    check_lambda(lambda);
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("edge probability must lie in [0, 1]");
    const double pc = critical_p(lambda);
    if (regime == Regime::Critical && std::fabs(p - pc) >= kCriticalTolerance)
        throw DomainError("critical regime requires p = p_c(lambda) = " + std::to_string(pc));
    if (regime == Regime::Supercritical && !(p > pc))
        throw DomainError("supercritical regime requires p > p_c(lambda) = " + std::to_string(pc));
    return ModelParams{d, p, lambda, regime};
}

ModelParams critical_params(int d, double lambda) {
    return make_params(d, critical_p(lambda), lambda, Regime::Critical);
}

double TheoryConstants::sigma() const { return std::sqrt(sigma_sq); }

std::pair<std::int64_t, std::int64_t> window_bounds(double mu, double exponent) {
    const double half_width = std::pow(mu, exponent);
    const auto lo = static_cast<std::int64_t>(std::ceil(mu - half_width));
    const auto hi = static_cast<std::int64_t>(std::floor(mu + half_width));
    return {std::max<std::int64_t>(lo, 0), hi};
}

TheoryConstants make_constants(const ModelParams& params, double window_exponent) {
    TheoryConstants c;
    c.mu = mu_theory(params.d, params.p, params.lambda);
    c.sigma_sq = sigma_sq_theory(params.d, params.p, params.lambda);
    c.zeta = zeta(params);
    c.p_crit = critical_p(params.lambda);
    std::tie(c.window_lo, c.window_hi) = window_bounds(c.mu, window_exponent);
    if (params.lambda == 1.0) c.cov = cov_theory(params.d, params.p);
    return c;
}

nlohmann::ordered_json to_json(const TheoryConstants& c) {
    nlohmann::ordered_json j;
    j["mu"] = c.mu;
    j["sigma_sq"] = c.sigma_sq;
    j["zeta"] = c.zeta;
    j["p_crit"] = c.p_crit;
    j["window_lo"] = c.window_lo;
    j["window_hi"] = c.window_hi;
    j["cov"] = c.cov ? nlohmann::ordered_json(*c.cov) : nlohmann::ordered_json(nullptr);
    return j;
}

nlohmann::ordered_json to_json(const ModelParams& m) {
    nlohmann::ordered_json j;
    j["d"] = m.d;
    j["p"] = m.p;
    j["lambda"] = m.lambda;
    j["regime"] = to_string(m.regime);
    return j;
}

double degree_weight(int degree, double lambda) {
    return lambda * std::pow(1.0 + lambda, -static_cast<double>(degree));
}

double vertex_weight(const PercolationInstance& inst, Vertex v, double lambda) {
    check_lambda(lambda);
    return degree_weight(open_degree(inst, v), lambda);
}

std::vector<std::uint64_t> degree_histogram(const PercolationInstance& inst, Parity side) {
    std::vector<std::uint64_t> hist(static_cast<std::size_t>(inst.d()) + 1, 0);
    if (side == Parity::Even) {
        const auto n = static_cast<Rank>(inst.dim().side_size());
        for (Rank r = 0; r < n; ++r) ++hist[static_cast<std::size_t>(std::popcount(inst.even_edge_field(r)))];
    } else {
        for (auto deg : inst.side_degrees(Parity::Odd)) ++hist[deg];
    }
    return hist;
}

SidePowerSums side_power_sums(const PercolationInstance& inst, Parity side, double lambda) {
    check_lambda(lambda);
    const auto hist = degree_histogram(inst, side);
    CompensatedSum s1, s2, s3;
    for (std::size_t k = 0; k < hist.size(); ++k) {
        if (hist[k] == 0) continue;
        const double w = degree_weight(static_cast<int>(k), lambda);
        const auto count = static_cast<double>(hist[k]);
        s1.add(count * w);
        s2.add(count * w * w);
        s3.add(count * w * w * w);
    }
    return {s1.value(), s2.value(), s3.value()};
}

PhiPair phi_sums(const PercolationInstance& inst, double lambda) {
    if (inst.d() > kPhiSweepMaxDim)
        throw DimensionError("phi_sums sweeps every vertex; d must be <= 28");
    return {side_power_sums(inst, Parity::Even, lambda).s1, side_power_sums(inst, Parity::Odd, lambda).s1};
}

double mu_theory(int d, double p, double lambda) {
    check_lambda(lambda);
    return lambda / 2.0 * std::pow(2.0 - 2.0 * lambda * p / (1.0 + lambda), d);
}

double sigma_sq_theory(int d, double p, double lambda) {
    check_lambda(lambda);
    const double inner = 1.0 - p + p / ((1.0 + lambda) * (1.0 + lambda));
    return lambda * lambda / 2.0 * std::pow(2.0 * inner, d);
}

double cov_theory(int d, double p, double lambda) {
    if (lambda != 1.0) throw UnsupportedError("the covariance closed form is derived for lambda = 1 only");
    const double q = (2.0 - p) * (2.0 - p) / 2.0;
    return d * std::pow(q, d - 1) * p * (1.0 - p) / 4.0;
}

double moment_theory(int d, double p, double lambda, int k) {
    check_lambda(lambda);
    if (k < 1) throw DomainError("moment order k must be a positive integer");
    return std::pow(lambda, k) * std::pow(1.0 - p + p / std::pow(1.0 + lambda, k), d);
}

double critical_p(double lambda) {
    check_lambda(lambda);
    if (!(lambda > std::sqrt(2.0) - 1.0))
        throw FugacityError("no critical probability in (0, 1) for lambda <= sqrt(2) - 1");
    return (1.0 + lambda) * (1.0 + lambda) / (2.0 * lambda * (2.0 + lambda));
}

double zeta(const ModelParams& params) {
    return params.regime == Regime::Critical ? std::exp(-params.lambda * params.lambda / 4.0) : 1.0;
}

double clt_statistic(const PhiPair& phis, const TheoryConstants& consts) {
    const double excess = std::expm1(phis.phi_even - consts.mu) + std::expm1(phis.phi_odd - consts.mu);
    return excess / (std::sqrt(2.0) * consts.sigma());
}

double critical_statistic(const PhiPair& phis, const TheoryConstants& consts) {
    return std::exp(phis.phi_even - consts.mu) + std::exp(phis.phi_odd - consts.mu);
}

}  // namespace cubeperc
