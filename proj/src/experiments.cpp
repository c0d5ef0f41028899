#include "cubeperc/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>

#include <fmt/format.h>

#include "cubeperc/birthday.hpp"
#include "cubeperc/exact.hpp"
#include "cubeperc/stats.hpp"
#include "cubeperc/tolerances.hpp"

#ifndef CUBEPERC_VERSION
#define CUBEPERC_VERSION "0.0.0"
#endif

namespace cubeperc {

namespace {

using json = nlohmann::ordered_json;

constexpr double kCriticalMatch = 1e-12;

std::string join(const std::vector<std::string>& cells) {
    std::string line;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) line += ',';
        line += cells[i];
    }
    line += '\n';
    return line;
}

std::string num(double x) { return format_number(x); }
std::string num(std::uint64_t x) { return std::to_string(x); }
std::string num(int x) { return std::to_string(x); }

json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

double require_p(const ExperimentConfig& cfg) {
    if (!cfg.p) throw DomainError(std::string(to_string(cfg.command)) + " needs --p");
    return *cfg.p;
}

bool is_critical(double p, double lambda) {
    return lambda > std::sqrt(2.0) - 1.0 && std::fabs(p - critical_p(lambda)) < kCriticalMatch;
}

std::uint64_t instance_seed(const ExperimentConfig& cfg, std::uint64_t i) { return derive_seed(cfg.seed, i, 0); }

Xoshiro256ss trial_rng(const ExperimentConfig& cfg, std::uint64_t i, std::uint64_t t) {
    return Xoshiro256ss(derive_seed(cfg.seed, i, t + 1));
}

json base_manifest(const ExperimentConfig& cfg, const std::vector<std::string>& columns) {
    json m;
    m["tool"] = "cubeperc";
    m["version"] = CUBEPERC_VERSION;
    m["command"] = to_string(cfg.command);
    m["config"] = to_json(cfg);
    m["seed_derivation"] = "instance i: derive_seed(seed, i, 0); trial t of instance i: derive_seed(seed, i, t + 1)";
    m["columns"] = columns;
    return m;
}

void fail(Report& r, std::string msg) {
    r.passed = false;
    r.failures.push_back(std::move(msg));
}

std::vector<int> grid_or_d(const ExperimentConfig& cfg) {
    return cfg.d_grid.empty() ? std::vector<int>{cfg.d} : cfg.d_grid;
}

/// (statistic, phi) rows for one d of the fluctuation commands.
struct PhiRow {
    std::uint64_t seed = 0;
    PhiPair phis;
    double statistic = 0.0;
    double exact_statistic = NAN;
};

}  // namespace

const char* to_string(Command c) noexcept {
    switch (c) {
        case Command::Exact: return "exact";
        case Command::Clt: return "clt";
        case Command::Critical: return "critical";
        case Command::Birthday: return "birthday";
        case Command::Sample: return "sample";
        case Command::Census: return "census";
    }
    return "?";
}

std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    return fmt::format("{}", x);
}

TheoryConstants constants_for(int d, double p, double lambda) {
    TheoryConstants c;
    c.mu = mu_theory(d, p, lambda);
    c.sigma_sq = sigma_sq_theory(d, p, lambda);
    const bool has_pc = lambda > std::sqrt(2.0) - 1.0;
    c.p_crit = has_pc ? critical_p(lambda) : NAN;
    c.zeta = is_critical(p, lambda) ? std::exp(-lambda * lambda / 4.0) : 1.0;
    std::tie(c.window_lo, c.window_hi) = window_bounds(c.mu);
    if (lambda == 1.0) c.cov = cov_theory(d, p);
    return c;
}

json to_json(const ExperimentConfig& cfg) {
    json j;
    j["command"] = to_string(cfg.command);
    j["d"] = cfg.d;
    j["p"] = cfg.p ? json(*cfg.p) : json(nullptr);
    j["lambda"] = cfg.lambda;
    j["regime"] = cfg.regime ? json(to_string(*cfg.regime)) : json(nullptr);
    j["seed"] = cfg.seed;
    j["instances"] = cfg.instances;
    j["trials"] = cfg.trials;
    j["n"] = cfg.n ? json(*cfg.n) : json(nullptr);
    j["format"] = cfg.format == OutputFormat::Json ? "json" : "csv";
    j["oracle"] = cfg.oracle;
    j["with_exact"] = cfg.with_exact;
    j["sampler"] = cfg.sampler;
    j["variant"] = to_string(cfg.variant);
    j["d_grid"] = cfg.d_grid;
    j["accept"] = cfg.accept;
    return j;
}

void parallel_for(std::uint64_t count, unsigned workers, const std::function<void(std::uint64_t)>& fn) {
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    const auto nthreads = static_cast<unsigned>(std::min<std::uint64_t>(workers, count));
    if (nthreads <= 1) {
        for (std::uint64_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::uint64_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto work = [&] {
        for (std::uint64_t i = next++; i < count; i = next++) {
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                next = count;
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < nthreads; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

// --- exact --------------------------------------------------------------------

Report cmd_exact(const ExperimentConfig& cfg, std::ostream& data) {
    const double p = require_p(cfg);
    if (cfg.d > kExactPartitionMaxDim)
        throw InfeasibleError("exact enumeration is limited to d <= 6 (d <= 5 for the defect pmf, d <= 4 for --oracle)");
    if (cfg.oracle && cfg.d > kNaiveMaxDim) throw InfeasibleError("--oracle needs d <= 4");
    const auto consts = constants_for(cfg.d, p, cfg.lambda);

    struct Row {
        std::uint64_t seed = 0;
        ExactPartition z;
        double zhat = 0.0;
        std::optional<DefectPmf> defect;
        std::optional<bool> oracle_match;
    };
    std::vector<Row> rows(cfg.instances);
    parallel_for(cfg.instances, cfg.workers, [&](std::uint64_t i) {
        Row& r = rows[i];
        r.seed = instance_seed(cfg, i);
        const auto inst = build_percolation(cfg.d, p, r.seed);
        const auto hist = subset_histogram(inst);
        if (cfg.lambda == 1.0) {
            r.z = exact_partition(inst);
            if (cfg.d <= kExactDefectMaxDim) r.defect = defect_distribution_exact(inst, hist);
        } else {
            r.z = exact_partition_hardcore(inst, hist, cfg.lambda);
        }
        r.zhat = scaled_count(r.z, consts);
        if (cfg.oracle) {
            r.oracle_match = cfg.lambda == 1.0
                                 ? BigInt(naive_count(inst)) == *r.z.z_integer
                                 : std::fabs(std::log(naive_partition(inst, cfg.lambda)) - r.z.log_z) <=
                                       tol::kLogAgreement;
        }
    });

    const std::vector<std::string> columns{"d", "p", "seed", "lambda", "log_z", "z_integer", "zhat", "oracle_match"};
    if (cfg.format == OutputFormat::Csv) data << join(columns);
    std::uint64_t mismatches = 0;
    for (const auto& r : rows) {
        if (r.oracle_match && !*r.oracle_match) ++mismatches;
        const std::string zint = r.z.z_integer ? to_string(*r.z.z_integer) : "";
        const std::string match = r.oracle_match ? (*r.oracle_match ? "true" : "false") : "";
        if (cfg.format == OutputFormat::Csv) {
            data << join({num(cfg.d), num(p), num(r.seed), num(cfg.lambda), num(r.z.log_z), zint, num(r.zhat), match});
            continue;
        }
        json j;
        j["d"] = cfg.d;
        j["p"] = p;
        j["seed"] = r.seed;
        j["lambda"] = cfg.lambda;
        j["log_z"] = r.z.log_z;
        j["z_integer"] = r.z.z_integer ? json(zint) : json(nullptr);
        j["zhat"] = number_or_null(r.zhat);
        j["defect_pmf"] = r.defect ? json(r.defect->probs) : json(nullptr);
        j["oracle_match"] = r.oracle_match ? json(*r.oracle_match) : json(nullptr);
        data << j.dump() << '\n';
    }

    Report rep;
    rep.summary["instances"] = cfg.instances;
    rep.summary["oracle_checked"] = cfg.oracle;
    rep.summary["oracle_mismatches"] = mismatches;
    if (!rows.empty() && rows.front().z.z_integer) rep.summary["first_z_integer"] = to_string(*rows.front().z.z_integer);
    if (!rows.empty()) rep.summary["first_log_z"] = rows.front().z.log_z;
    rep.manifest = base_manifest(cfg, columns);
    rep.manifest["theory"] = to_json(consts);
    rep.manifest["record_format"] = cfg.format == OutputFormat::Json ? "jsonl" : "csv";
    if (mismatches) fail(rep, fmt::format("{} oracle mismatches", mismatches));
    return rep;
}

// --- clt / critical -------------------------------------------------------------------

namespace {

std::vector<PhiRow> phi_rows(const ExperimentConfig& cfg, int d, double p, const TheoryConstants& consts,
                             bool critical) {
    std::vector<PhiRow> rows(cfg.instances);
    parallel_for(cfg.instances, cfg.workers, [&](std::uint64_t i) {
        PhiRow& r = rows[i];
        r.seed = instance_seed(cfg, i);
        const auto inst = build_percolation(d, p, r.seed);
        r.phis = phi_sums(inst, cfg.lambda);
        r.statistic = critical ? critical_statistic(r.phis, consts) : clt_statistic(r.phis, consts);
        if (cfg.with_exact && d <= kExactPartitionMaxDim) {
            const double zhat = scaled_count(inst, cfg.lambda, consts);
            r.exact_statistic = critical ? 2.0 * zhat / consts.zeta
                                         : std::numbers::sqrt2 * (zhat - 1.0) / consts.sigma();
        }
    });
    return rows;
}

std::vector<std::string> phi_columns(bool with_exact) {
    std::vector<std::string> c{"instance", "seed", "d", "p", "lambda", "phi_even", "phi_odd", "statistic"};
    if (with_exact) c.emplace_back("exact_statistic");
    return c;
}

void write_phi_rows(std::ostream& data, const std::vector<PhiRow>& rows, int d, double p, double lambda,
                    bool with_exact) {
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        std::vector<std::string> cells{num(static_cast<std::uint64_t>(i)), num(r.seed), num(d),
                                       num(p), num(lambda), num(r.phis.phi_even),
                                       num(r.phis.phi_odd), num(r.statistic)};
        if (with_exact) cells.push_back(num(r.exact_statistic));
        data << join(cells);
    }
}

json sample_summary(const std::vector<double>& xs) {
    const auto m = sample_moments(xs);
    json j;
    j["count"] = m.n;
    j["mean"] = m.mean;
    j["variance"] = m.variance;
    return j;
}

}  // namespace

Report cmd_clt(const ExperimentConfig& cfg, std::ostream& data) {
    if (cfg.regime == Regime::Critical) throw DomainError("clt runs in the supercritical regime; use `critical`");
    const double p = require_p(cfg);
    const auto params = make_params(cfg.d, p, cfg.lambda, Regime::Supercritical);
    const auto consts = make_constants(params);
    const auto rows = phi_rows(cfg, cfg.d, p, consts, false);

    const auto columns = phi_columns(cfg.with_exact);
    data << join(columns);
    write_phi_rows(data, rows, cfg.d, p, cfg.lambda, cfg.with_exact);

    std::vector<double> stats;
    for (const auto& r : rows) stats.push_back(r.statistic);
    Report rep;
    rep.summary = sample_summary(stats);
    const bool enough = stats.size() >= kMinKsSamples;
    const double ks = enough ? ks_statistic(stats, ReferenceDistribution::std_normal()) : NAN;
    rep.summary["ks_std_normal"] = number_or_null(ks);
    rep.summary["ks_threshold"] = tol::kKsClt;
    rep.manifest = base_manifest(cfg, columns);
    rep.manifest["params"] = to_json(params);
    rep.manifest["theory"] = to_json(consts);
    if (!enough)
        fail(rep, "KS needs at least 50 instances");
    else if (!(ks < tol::kKsClt))
        fail(rep, fmt::format("KS {} >= {}", ks, tol::kKsClt));
    return rep;
}

Report cmd_critical(const ExperimentConfig& cfg, std::ostream& data) {
    if (cfg.regime == Regime::Supercritical) throw DomainError("critical runs at p = p_c(lambda); use `clt`");
    const double p = cfg.p.value_or(critical_p(cfg.lambda));
    const auto grid = grid_or_d(cfg);
    const auto columns = phi_columns(cfg.with_exact);
    data << join(columns);

    Report rep;
    rep.manifest = base_manifest(cfg, columns);
    json trend = json::array();
    json theory = json::object();
    std::vector<double> ks_values;
    bool enough = true;
    for (int d : grid) {
        const auto params = make_params(d, p, cfg.lambda, Regime::Critical);
        const auto consts = make_constants(params);
        const auto rows = phi_rows(cfg, d, p, consts, true);
        write_phi_rows(data, rows, d, p, cfg.lambda, cfg.with_exact);
        std::vector<double> stats;
        for (const auto& r : rows) stats.push_back(r.statistic);
        enough = enough && stats.size() >= kMinKsSamples;
        const double ks =
            stats.size() >= kMinKsSamples ? ks_statistic(stats, ReferenceDistribution::lognormal_sum(cfg.lambda)) : NAN;
        ks_values.push_back(ks);
        json entry = sample_summary(stats);
        entry["d"] = d;
        entry["ks_lognormal_sum"] = number_or_null(ks);
        trend.push_back(entry);
        theory[std::to_string(d)] = to_json(consts);
    }
    bool nonincreasing = true;
    for (std::size_t k = 1; k < ks_values.size(); ++k) nonincreasing = nonincreasing && ks_values[k] <= ks_values[k - 1];
    rep.summary["p"] = p;
    rep.summary["trend"] = trend;
    rep.summary["ks_nonincreasing"] = nonincreasing;
    rep.summary["ks_final"] = number_or_null(ks_values.back());
    rep.summary["ks_threshold"] = tol::kKsCritical;
    rep.manifest["theory"] = theory;

    // Reference CDF on a fixed grid for plotting tools.
    const double sigma = cfg.lambda / std::numbers::sqrt2;
    const double x_max = 2.0 * std::exp(4.0 * sigma);
    json xs = json::array(), cdf = json::array();
    for (int k = 0; k <= 200; ++k) {
        const double x = x_max * k / 200.0;
        xs.push_back(x);
        cdf.push_back(lognormal_sum_cdf(x, cfg.lambda));
    }
    rep.manifest["reference_cdf"] = {{"kind", "lognormal_sum"}, {"lambda", cfg.lambda}, {"x", xs}, {"cdf", cdf}};

    if (!enough)
        fail(rep, "KS needs at least 50 instances per dimension");
    else if (!(ks_values.back() < tol::kKsCritical))
        fail(rep, fmt::format("KS {} >= {} at d = {}", ks_values.back(), tol::kKsCritical, grid.back()));
    if (ks_values.size() > 1 && !(ks_values.back() <= ks_values.front()))
        fail(rep, "KS at the largest d exceeds KS at the smallest d");
    return rep;
}

// --- birthday -----------------------------------------------------------------

Report cmd_birthday(const ExperimentConfig& cfg, std::ostream& data) {
    const double p = require_p(cfg);
    CubeDim{cfg.d};
    const auto consts = constants_for(cfg.d, p, cfg.lambda);
    const std::uint64_t n = cfg.n.value_or(static_cast<std::uint64_t>(std::llround(consts.mu)));
    if (n < 2) throw DomainError("birthday needs n >= 2 (round(mu) = " + std::to_string(n) + ")");
    if (cfg.trials < 1) throw DomainError("birthday needs at least one trial");
    const bool critical = is_critical(p, cfg.lambda);

    struct Row {
        std::uint64_t seed = 0;
        double theta = 0.0;
        SteinDiagnostics diag{NAN, NAN, NAN};
        BirthdayRun run;
        double tv_collide = 0.0;
        double tv_repeat = 0.0;
    };
    std::vector<Row> rows(cfg.instances);
    parallel_for(cfg.instances, cfg.workers, [&](std::uint64_t i) {
        Row& r = rows[i];
        r.seed = instance_seed(cfg, i);
        const auto inst = build_percolation(cfg.d, p, r.seed);
        const auto m = build_measure(inst, Parity::Even, cfg.lambda);
        r.theta = theta(m, n);
        if (cfg.d <= kSteinMaxDim) r.diag = stein_diagnostics(m, n);
        auto rng = trial_rng(cfg, i, 0);
        r.run = run_birthday(m, n, cfg.trials, rng);
        const auto ref = poisson_pmf_vector(r.theta);
        r.tv_collide = tv_discrete(r.run.collide_pmf, ref);
        r.tv_repeat = tv_discrete(r.run.repeat_pmf, ref);
    });

    const std::vector<std::string> columns{
        "d", "p", "lambda", "seed", "n", "trial_block", "n_repeat_mean", "n_neighbor_mean", "p_no_collision",
        "theta", "y1", "y2", "y3", "n_collide_mean", "tv_collide_poisson", "tv_repeat_poisson"};
    data << join(columns);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        data << join({num(cfg.d), num(p), num(cfg.lambda), num(r.seed), num(n), num(static_cast<std::uint64_t>(i)),
                      num(r.run.mean_repeat), num(r.run.mean_neighbor), num(r.run.p_no_collision), num(r.theta),
                      num(r.diag.y1), num(r.diag.y2), num(r.diag.y3), num(r.run.mean_collide), num(r.tv_collide),
                      num(r.tv_repeat)});
    }

    const double theta0 = cfg.lambda * cfg.lambda / 4.0;
    const double half_width = cfg.lambda == 1.0 ? tol::kThetaAbsUniform : tol::kThetaRelHardcore * theta0;
    std::uint64_t theta_in = 0, no_coll_in = 0;
    double mean_no = 0, mean_tv = 0, mean_tv_repeat = 0, mean_theta = 0, mean_neighbor = 0;
    for (const auto& r : rows) {
        theta_in += std::fabs(r.theta - theta0) <= half_width;
        no_coll_in += std::fabs(r.run.p_no_collision - std::exp(-theta0)) < tol::kNoCollisionAbs;
        mean_no += r.run.p_no_collision;
        mean_tv += r.tv_collide;
        mean_tv_repeat += r.tv_repeat;
        mean_theta += r.theta;
        mean_neighbor += r.run.mean_neighbor;
    }
    const auto k = static_cast<double>(std::max<std::size_t>(rows.size(), 1));
    Report rep;
    rep.summary["n"] = n;
    rep.summary["critical"] = critical;
    rep.summary["theta0"] = theta0;
    rep.summary["theta_window"] = {theta0 - half_width, theta0 + half_width};
    rep.summary["mean_theta"] = mean_theta / k;
    rep.summary["fraction_theta_in_window"] = static_cast<double>(theta_in) / k;
    rep.summary["target_no_collision"] = std::exp(-theta0);
    rep.summary["fraction_no_collision_within_tol"] = static_cast<double>(no_coll_in) / k;
    rep.summary["mean_p_no_collision"] = mean_no / k;
    rep.summary["mean_n_neighbor"] = mean_neighbor / k;
    rep.summary["mean_tv_collide_poisson"] = mean_tv / k;
    rep.summary["mean_tv_repeat_poisson"] = mean_tv_repeat / k;
    rep.manifest = base_manifest(cfg, columns);
    rep.manifest["theory"] = to_json(consts);
    rep.manifest["n"] = n;
    if (critical) {
        if (!(static_cast<double>(theta_in) / k >= tol::kThetaFraction)) fail(rep, "theta outside its window too often");
        if (!(static_cast<double>(no_coll_in) / k >= tol::kNoCollisionFraction))
            fail(rep, "P(no collision) misses exp(-theta0) too often");
        if (!(mean_tv / k < tol::kTvCollide)) fail(rep, "TV(N_Collide, Poisson(theta)) too large");
    } else if (!(mean_no / k > tol::kSupercriticalNoCollision)) {
        fail(rep, "P(no collision) not above 0.99");
    }
    return rep;
}

// --- sample -------------------------------------------------------------------

Report cmd_sample(const ExperimentConfig& cfg, std::ostream& data) {
    const double p = require_p(cfg);
    CubeDim{cfg.d};
    const bool uniform = cfg.sampler == "uniform";
    if (!uniform && cfg.sampler != "approx") throw DomainError("--sampler must be approx or uniform");
    if (uniform && cfg.d > kUniformSamplerMaxDim) throw InfeasibleError("the uniform sampler needs d <= 5");
    if (uniform && cfg.lambda != 1.0) throw DomainError("the uniform sampler is the lambda = 1 law");
    const auto consts = constants_for(cfg.d, p, cfg.lambda);

    std::vector<PercolationInstance> instances;
    instances.reserve(cfg.instances);
    for (std::uint64_t i = 0; i < cfg.instances; ++i) instances.push_back(build_percolation(cfg.d, p, instance_seed(cfg, i)));
    std::vector<std::optional<ApproxSampler>> approx(cfg.instances);
    std::vector<std::optional<UniformSampler>> exact(cfg.instances);
    std::vector<double> tv_exact(cfg.instances, NAN);
    const bool want_tv = !uniform && cfg.d <= kSetPmfMaxDim;
    parallel_for(cfg.instances, cfg.workers, [&](std::uint64_t i) {
        if (uniform)
            exact[i].emplace(instances[i]);
        else
            approx[i].emplace(instances[i], cfg.lambda, cfg.variant);
        if (want_tv) tv_exact[i] = tv_samplers_exact(instances[i], cfg.lambda, cfg.variant);
    });

    struct Row {
        Parity side = Parity::Even;
        std::uint64_t s1 = 0, s2 = 0, defect = 0;
        bool valid = true;
    };
    const std::uint64_t total = cfg.instances * cfg.trials;
    std::vector<Row> rows(total);
    parallel_for(total, cfg.workers, [&](std::uint64_t k) {
        const std::uint64_t i = k / cfg.trials, t = k % cfg.trials;
        auto rng = trial_rng(cfg, i, t);
        const auto rec = uniform ? exact[i]->sample(rng) : approx[i]->sample(rng);
        rows[k] = {rec.chosen_side, rec.s1_size, rec.s2_size, rec.defect_size, rec.set.is_valid(instances[i])};
    });

    const std::vector<std::string> columns{"seed", "trial", "side", "s1_size", "s2_size", "defect_size"};
    data << join(columns);
    std::vector<std::uint64_t> s1, defect;
    std::uint64_t invalid = 0, even_count = 0;
    for (std::uint64_t k = 0; k < total; ++k) {
        const auto& r = rows[k];
        data << join({num(instances[k / cfg.trials].seed()), num(k % cfg.trials), to_string(r.side), num(r.s1),
                      num(r.s2), num(r.defect)});
        s1.push_back(r.s1);
        defect.push_back(r.defect);
        invalid += !r.valid;
        even_count += r.side == Parity::Even;
    }

    Report rep;
    const auto ref = poisson_pmf_vector(consts.mu);
    const double tv_s1 = total ? tv_discrete(empirical_pmf(s1), ref) : NAN;
    const double tv_defect = total ? tv_discrete(empirical_pmf(defect), ref) : NAN;
    rep.summary["samples"] = total;
    rep.summary["invalid_sets"] = invalid;
    rep.summary["fraction_even_side"] = total ? static_cast<double>(even_count) / static_cast<double>(total) : 0.0;
    rep.summary["mu"] = consts.mu;
    rep.summary["tv_s1_poisson_mu"] = number_or_null(tv_s1);
    rep.summary["tv_defect_poisson_mu"] = number_or_null(tv_defect);
    if (want_tv) {
        double mean = 0;
        for (double v : tv_exact) mean += v;
        rep.summary["tv_samplers_exact"] = tv_exact;
        rep.summary["mean_tv_samplers_exact"] = cfg.instances ? mean / static_cast<double>(cfg.instances) : 0.0;
    }
    rep.manifest = base_manifest(cfg, columns);
    rep.manifest["theory"] = to_json(consts);
    if (!uniform && cfg.lambda != 1.0)
        rep.manifest["extension"] = "general-lambda sampler: step 2 keeps v with phi_v/(1+phi_v), step 3 with lambda/(1+lambda)";
    if (invalid) fail(rep, fmt::format("{} invalid independent sets", invalid));
    if (!(tv_s1 < tol::kTvDefect)) fail(rep, fmt::format("TV(s1_size, Poisson(mu)) = {} >= {}", tv_s1, tol::kTvDefect));
    return rep;
}

// --- census ---------------------------------------------------------------------

Report cmd_census(const ExperimentConfig& cfg, std::ostream& data) {
    const double p = require_p(cfg);
    const auto grid = grid_or_d(cfg);
    struct Row {
        DimerCensus census;
        double ratio = NAN;  ///< census(d) / census(d - 1)
    };
    std::vector<Row> rows(grid.size());
    parallel_for(grid.size(), cfg.workers, [&](std::uint64_t k) {
        Row& r = rows[k];
        r.census = dimer_census(grid[k], p);
        if (grid[k] > CubeDim::kMin) r.ratio = r.census.census / dimer_census(grid[k] - 1, p).census;
    });
    const std::vector<std::string> columns{"d", "p", "pair_count", "census", "ratio"};
    data << join(columns);
    json trend = json::array();
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const auto& r = rows[k];
        data << join({num(grid[k]), num(p), num(r.census.pair_count), num(r.census.census), num(r.ratio)});
        trend.push_back({{"d", grid[k]}, {"census", r.census.census}, {"ratio", number_or_null(r.ratio)}});
    }
    // Smallest grid dimension from which every ratio stays below 1.
    std::optional<int> below_from;
    for (std::size_t k = rows.size(); k-- > 0;) {
        if (!(rows[k].ratio < 1.0)) break;
        below_from = grid[k];
    }
    Report rep;
    rep.summary["trend"] = trend;
    rep.summary["ratio_below_one_from_d"] = below_from ? json(*below_from) : json(nullptr);
    rep.manifest = base_manifest(cfg, columns);
    if (!below_from) fail(rep, "census(d) / census(d - 1) is not below 1 at the largest d of the grid");
    return rep;
}

Report run_experiment(const ExperimentConfig& cfg, std::ostream& data) {
    switch (cfg.command) {
        case Command::Exact: return cmd_exact(cfg, data);
        case Command::Clt: return cmd_clt(cfg, data);
        case Command::Critical: return cmd_critical(cfg, data);
        case Command::Birthday: return cmd_birthday(cfg, data);
        case Command::Sample: return cmd_sample(cfg, data);
        case Command::Census: return cmd_census(cfg, data);
    }
    throw DomainError("unknown command");
}

}  // namespace cubeperc
