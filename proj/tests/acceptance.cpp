// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance [--only N] [--workers W]

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/core.h>

#include "cubeperc/birthday.hpp"
#include "cubeperc/exact.hpp"
#include "cubeperc/experiments.hpp"
#include "cubeperc/rng.hpp"
#include "cubeperc/samplers.hpp"
#include "cubeperc/stats.hpp"
#include "cubeperc/tolerances.hpp"
#include "cubeperc/weights.hpp"

using namespace cubeperc;

namespace {

constexpr std::uint64_t kSeed = 20240601;

struct Outcome {
    bool pass = true;
    std::vector<std::string> notes;

    void check(bool ok, const std::string& what) {
        pass = pass && ok;
        notes.push_back((ok ? "ok: " : "FAILED: ") + what);
    }
    void info(const std::string& what) { notes.push_back("info: " + what); }
};

struct Criterion {
    int id;
    const char* title;
    double budget_seconds;
    std::function<Outcome(unsigned)> run;
};

Report run_silent(const ExperimentConfig& cfg) {
    std::ostringstream sink;
    return run_experiment(cfg, sink);
}

std::string run_csv(const ExperimentConfig& cfg) {
    std::ostringstream out;
    run_experiment(cfg, out);
    return out.str();
}

ExperimentConfig config(Command c, int d, double p, double lambda, unsigned workers) {
    ExperimentConfig cfg;
    cfg.command = c;
    cfg.d = d;
    cfg.p = p;
    cfg.lambda = lambda;
    cfg.seed = kSeed;
    cfg.workers = workers;
    return cfg;
}

double mean_of(const std::vector<double>& xs) { return std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size(); }

// 1. Sweep-based counts equal brute-force enumeration.
Outcome c1_oracle(unsigned) {
    Outcome out;
    Xoshiro256ss rng(kSeed);
    int integer_mismatch = 0, log_mismatch = 0, cases = 0;
    double worst = 0.0;
    for (int d : {3, 4}) {
        for (int k = 0; k < 20; ++k) {
            const double p = uniform01(rng);
            const std::uint64_t seed = rng();
            const auto inst = build_percolation(d, p, seed);
            ++cases;
            if (exact_partition(inst).z_integer != BigInt(naive_count(inst))) ++integer_mismatch;
            for (double lambda : {0.5, 1.0, 2.0}) {
                const double err =
                    std::fabs(exact_partition_hardcore(inst, lambda).log_z - std::log(naive_partition(inst, lambda)));
                worst = std::max(worst, err);
                if (!(err <= tol::kLogAgreement)) ++log_mismatch;
            }
        }
    }
    out.check(integer_mismatch == 0, fmt::format("{} integer mismatches over {} (d, p, seed) cases", integer_mismatch, cases));
    out.check(log_mismatch == 0, fmt::format("hardcore log Z max error {:.3g} (tol {:g})", worst, tol::kLogAgreement));
    return out;
}

// 2. Known counts.
Outcome c2_known(unsigned) {
    Outcome out;
    auto z = [](int d, double p) { return *exact_partition(build_percolation(d, p, kSeed)).z_integer; };
    out.check(z(2, 1.0) == 7, "Z(d=2, p=1) = " + to_string(z(2, 1.0)));
    out.check(z(3, 1.0) == 35, "Z(d=3, p=1) = " + to_string(z(3, 1.0)));
    for (int d = 2; d <= 4; ++d) {
        const BigInt expect = BigInt(1) << (1 << d);
        out.check(z(d, 0.0) == expect, fmt::format("Z(d={}, p=0) = {} = 2^(2^{})", d, to_string(z(d, 0.0)), d));
    }
    return out;
}

// 3. Monte Carlo mean of Z matches E[Z].
Outcome c3_expectation(unsigned workers) {
    Outcome out;
    const std::uint64_t seeds = 10000;
    for (double p : {0.7, 0.8, 0.9}) {
        std::vector<double> zs(seeds);
        parallel_for(seeds, workers, [&](std::uint64_t i) {
            zs[i] = exact_partition(build_percolation(4, p, derive_seed(kSeed, i))).z_integer->convert_to<double>();
        });
        const auto m = sample_moments(zs);
        const double expect = expected_partition(4, p);
        const double z = (m.mean - expect) / m.std_error();
        out.check(std::fabs(z) <= tol::kStandardErrors,
                  fmt::format("p={}: mean Z {:.4f} vs E[Z] {:.4f}, {:+.2f} SE", p, m.mean, expect, z));
    }
    return out;
}

// 4. Empirical E[phi^k] over fresh instances.
Outcome c4_moments(unsigned workers) {
    Outcome out;
    const int d = 10;
    const double p = 0.8;
    const std::uint64_t draws = 100000;
    for (double lambda : {1.0, 2.0}) {
        std::vector<double> phi(draws);
        parallel_for(draws, workers, [&](std::uint64_t i) {
            const auto inst = build_percolation(d, p, derive_seed(kSeed, i));
            Xoshiro256ss rng(derive_seed(kSeed, i, 1));
            const auto v = static_cast<Vertex>(uniform_below(rng, std::uint64_t{1} << d));
            phi[i] = vertex_weight(inst, v, lambda);
        });
        for (int k = 1; k <= 4; ++k) {
            std::vector<double> pk(draws);
            for (std::uint64_t i = 0; i < draws; ++i) pk[i] = std::pow(phi[i], k);
            const auto m = sample_moments(pk);
            const double expect = moment_theory(d, p, lambda, k);
            const double z = (m.mean - expect) / m.std_error();
            out.check(std::fabs(z) <= tol::kStandardErrors,
                      fmt::format("lambda={} k={}: {:.6g} vs {:.6g}, {:+.2f} SE", lambda, k, m.mean, expect, z));
        }
    }
    return out;
}

// 5. Var(Phi) and Cov(Phi_Even, Phi_Odd) across instances.
Outcome c5_variance(unsigned workers) {
    Outcome out;
    const int d = 12;
    const double p = 0.8;
    const std::uint64_t n = 10000;
    std::vector<double> even(n), odd(n);
    parallel_for(n, workers, [&](std::uint64_t i) {
        const auto ph = phi_sums(build_percolation(d, p, derive_seed(kSeed, i)), 1.0);
        even[i] = ph.phi_even;
        odd[i] = ph.phi_odd;
    });
    const auto me = sample_moments(even);
    const auto mo = sample_moments(odd);
    const double var = 0.5 * (me.variance + mo.variance);
    const double sigma_sq = sigma_sq_theory(d, p);
    const double cov = sample_covariance(even, odd);
    const double cov_th = cov_theory(d, p);
    std::vector<double> prod(n);
    for (std::uint64_t i = 0; i < n; ++i) prod[i] = (even[i] - me.mean) * (odd[i] - mo.mean);
    const double cov_se = sample_moments(prod).std_error();

    // Exact finite-d variance: even vertices have disjoint edge sets.
    const double exact_var = std::ldexp(std::pow(1 - 0.75 * p, d) - std::pow(1 - 0.5 * p, 2 * d), d - 1);
    out.check(std::fabs(var / sigma_sq - 1.0) <= tol::kVarianceRel,
              fmt::format("Var(Phi) {:.5f} vs sigma^2 {:.5f} (rel err {:+.3f})", var, sigma_sq, var / sigma_sq - 1));
    out.check(std::fabs(cov) <= tol::kCovOverVar * var,
              fmt::format("|Cov| {:.5f} vs 0.05 Var = {:.5f} (ratio {:.3f})", std::fabs(cov), tol::kCovOverVar * var,
                          std::fabs(cov) / var));
    out.check(std::fabs(cov - cov_th) <= tol::kStandardErrors * cov_se,
              fmt::format("Cov {:.5f} vs cov_theory {:.5f}, {:+.2f} SE", cov, cov_th, (cov - cov_th) / cov_se));
    out.info(fmt::format("exact finite-d Var(Phi_Even) = {:.5f}; empirical / exact = {:.4f}", exact_var,
                         var / exact_var));
    return out;
}

// 6. Supercritical CLT.
Outcome c6_clt(unsigned workers) {
    Outcome out;
    for (double lambda : {1.0, 2.0}) {
        auto cfg = config(Command::Clt, 20, 0.8, lambda, workers);
        cfg.instances = 2000;
        const auto rep = run_silent(cfg);
        const double ks = rep.summary.at("ks_std_normal").get<double>();
        out.check(ks < tol::kKsClt, fmt::format("lambda={}: KS {:.4f} (< {})", lambda, ks, tol::kKsClt));
    }
    return out;
}

// 7. Critical log-normal sum.
Outcome c7_critical(unsigned workers) {
    Outcome out;
    auto cfg = config(Command::Critical, 20, critical_p(1.0), 1.0, workers);
    cfg.instances = 2000;
    cfg.d_grid = {12, 20};
    const auto rep = run_silent(cfg);
    const auto& trend = rep.summary.at("trend");
    const double ks12 = trend[0].at("ks_lognormal_sum").get<double>();
    const double ks20 = trend[1].at("ks_lognormal_sum").get<double>();
    out.check(ks20 < tol::kKsCritical, fmt::format("d=20: KS {:.4f} (< {})", ks20, tol::kKsCritical));
    out.check(ks20 <= ks12, fmt::format("KS(d=20) {:.4f} <= KS(d=12) {:.4f}", ks20, ks12));
    return out;
}

// 8. θ concentrates at λ²/4.
Outcome c8_theta(unsigned workers) {
    Outcome out;
    for (double lambda : {1.0, 2.0}) {
        auto cfg = config(Command::Birthday, 20, critical_p(lambda), lambda, workers);
        cfg.instances = 100;
        cfg.trials = 1;
        const auto rep = run_silent(cfg);
        const double frac = rep.summary.at("fraction_theta_in_window").get<double>();
        const auto& w = rep.summary.at("theta_window");
        out.check(frac >= tol::kThetaFraction,
                  fmt::format("lambda={}: {:.0f}/100 instances with theta in [{:.3g}, {:.3g}] (mean theta {:.4f})", lambda,
                              100 * frac, w[0].get<double>(), w[1].get<double>(),
                              rep.summary.at("mean_theta").get<double>()));
    }
    return out;
}

// 9. Collision law.
Outcome c9_collision(unsigned workers) {
    Outcome out;
    auto cfg = config(Command::Birthday, 20, critical_p(1.0), 1.0, workers);
    cfg.instances = 100;
    cfg.trials = 10000;
    const auto rep = run_silent(cfg);
    const auto& s = rep.summary;
    const double frac = s.at("fraction_no_collision_within_tol").get<double>();
    out.check(frac >= tol::kNoCollisionFraction,
              fmt::format("{:.0f}/100 instances with |P(no collision) - e^(-1/4)| < {} (mean P {:.4f}, target {:.4f})",
                          100 * frac, tol::kNoCollisionAbs, s.at("mean_p_no_collision").get<double>(),
                          s.at("target_no_collision").get<double>()));
    const double tv = s.at("mean_tv_collide_poisson").get<double>();
    out.check(tv < tol::kTvCollide, fmt::format("mean TV(N_Collide, Poisson(theta)) {:.4f} (< {})", tv, tol::kTvCollide));
    out.info(fmt::format("mean N_Neighbor {:.3f}; repeat-only TV(N_Repeat, Poisson(theta)) {:.4f}",
                         s.at("mean_n_neighbor").get<double>(), s.at("mean_tv_repeat_poisson").get<double>()));

    auto sup = config(Command::Birthday, 18, 0.8, 1.0, workers);
    sup.instances = 100;
    sup.trials = 10000;
    const auto srep = run_silent(sup);
    const double p_none = srep.summary.at("mean_p_no_collision").get<double>();
    out.check(p_none > tol::kSupercriticalNoCollision,
              fmt::format("supercritical d=18 p=0.8: P(no collision) {:.4f} (> {}), n = {}", p_none,
                          tol::kSupercriticalNoCollision, srep.summary.at("n").get<std::uint64_t>()));
    return out;
}

// 10. Defect-size Poisson law.
Outcome c10_defect(unsigned workers) {
    Outcome out;
    auto cfg = config(Command::Sample, 16, 0.8, 1.0, workers);
    cfg.variant = SamplerVariant::Tilted;
    cfg.instances = 1;
    cfg.trials = 100000;
    const auto rep = run_silent(cfg);
    const double tv = rep.summary.at("tv_s1_poisson_mu").get<double>();
    out.check(tv < tol::kTvDefect, fmt::format("d=16: TV(|S1|, Poisson(mu)) {:.4f} (< {})", tv, tol::kTvDefect));
    out.info(fmt::format("d=16: TV(defect size, Poisson(mu)) {:.4f}", rep.summary.at("tv_defect_poisson_mu").get<double>()));

    const std::uint64_t seeds = 50;
    double means[2] = {0, 0};
    for (int d : {4, 5}) {
        const auto pois = poisson_pmf_vector(mu_theory(d, 0.8));
        std::vector<double> tvs(seeds);
        parallel_for(seeds, workers, [&](std::uint64_t i) {
            tvs[i] = tv_discrete(defect_distribution_exact(build_percolation(d, 0.8, derive_seed(kSeed, i))).probs, pois);
        });
        means[d - 4] = mean_of(tvs);
    }
    out.check(means[1] <= means[0],
              fmt::format("exact TV(defect pmf, Poisson(mu)) mean over 50 seeds: d=4 {:.4f}, d=5 {:.4f}", means[0], means[1]));
    return out;
}

// 11. Sampler fidelity.
Outcome c11_samplers(unsigned workers) {
    Outcome out;
    const std::uint64_t seeds = 50;
    for (auto variant : {SamplerVariant::Symmetric, SamplerVariant::Tilted}) {
        double means[2] = {0, 0};
        for (int d : {3, 4}) {
            std::vector<double> tvs(seeds);
            parallel_for(seeds, workers, [&](std::uint64_t i) {
                tvs[i] = tv_samplers_exact(build_percolation(d, 0.9, derive_seed(kSeed, i)), 1.0, variant);
            });
            means[d - 3] = mean_of(tvs);
        }
        const bool ok = std::isfinite(means[1]) && means[1] < means[0];
        const auto line = fmt::format("{}: mean exact TV(approx, uniform) d=3 {:.4f}, d=4 {:.4f}", to_string(variant),
                                      means[0], means[1]);
        if (variant == SamplerVariant::Symmetric)
            out.check(ok, line);
        else
            out.info(line);
    }

    const std::uint64_t instances = 10, per = 10000;
    std::vector<std::uint64_t> invalid(instances, 0);
    parallel_for(instances, workers, [&](std::uint64_t i) {
        const auto inst = build_percolation(12, 0.9, derive_seed(kSeed, i));
        const ApproxSampler sampler(inst, 1.0, SamplerVariant::Symmetric);
        Xoshiro256ss rng(derive_seed(kSeed, i, 1));
        for (std::uint64_t t = 0; t < per; ++t) invalid[i] += !sampler.sample(rng).set.is_valid(inst);
    });
    const auto bad = std::accumulate(invalid.begin(), invalid.end(), std::uint64_t{0});
    out.check(bad == 0, fmt::format("{} invalid sets in {} samples (d=12, p=0.9)", bad, instances * per));
    return out;
}

// 12. Poisson tail bounds and total variation.
Outcome c12_poisson(unsigned) {
    Outcome out;
    int checked = 0, violated = 0, skipped = 0;
    for (double theta : {10.0, 100.0, 1000.0})
        for (double t : {1.0, 2.0, 3.0})
            for (auto side : {TailSide::Upper, TailSide::Lower, TailSide::TwoSided}) {
                const auto b = poisson_tail_bound(theta, t, side);
                if (!b.applicable) {
                    ++skipped;
                    continue;
                }
                ++checked;
                violated += !(poisson_tail_exact(theta, t, side) <= b.value);
            }
    out.check(violated == 0, fmt::format("{} of {} applicable tail bounds violated ({} outside the bound's range)",
                                         violated, checked, skipped));

    int tv_violated = 0;
    double max_ratio = 0.0;
    const double grid[] = {0.1, 0.5, 1.0, 2.0, 5.0};
    for (double a : grid)
        for (double b : {0.3, 1.5, 4.0, 20.0}) {
            const double tv = poisson_tv_exact(a, b).value;
            tv_violated += !(tv <= std::min(1.0, std::fabs(a - b)) + 1e-12);
            max_ratio = std::max(max_ratio, tv / poisson_tv_bound(a, b));
        }
    out.check(tv_violated == 0, fmt::format("{} of 20 grid points with TV > min(1, |theta1 - theta2|)", tv_violated));
    out.info(fmt::format("max TV / |sqrt(theta1) - sqrt(theta2)| on the grid: {:.3f}", max_ratio));
    return out;
}

// 13. Output is independent of the worker count.
Outcome c13_determinism(unsigned) {
    Outcome out;
    std::vector<std::pair<std::string, ExperimentConfig>> runs;
    auto exact = config(Command::Exact, 4, 0.8, 1.0, 1);
    exact.instances = 50;
    exact.format = OutputFormat::Csv;
    runs.emplace_back("exact", exact);
    auto clt = config(Command::Clt, 20, 0.8, 1.0, 1);
    clt.instances = 200;
    runs.emplace_back("clt", clt);
    auto crit = config(Command::Critical, 20, critical_p(1.0), 1.0, 1);
    crit.instances = 100;
    crit.d_grid = {12, 20};
    runs.emplace_back("critical", crit);
    auto bday = config(Command::Birthday, 20, critical_p(1.0), 1.0, 1);
    bday.instances = 8;
    bday.trials = 500;
    runs.emplace_back("birthday", bday);
    auto sample = config(Command::Sample, 16, 0.8, 1.0, 1);
    sample.instances = 3;
    sample.trials = 2000;
    runs.emplace_back("sample", sample);
    auto census = config(Command::Census, 4, 0.8, 1.0, 1);
    census.d_grid = {4, 6, 8};
    runs.emplace_back("census", census);
    for (auto& [name, cfg] : runs) {
        cfg.workers = 1;
        const auto a = run_csv(cfg);
        cfg.workers = 4;
        const auto b = run_csv(cfg);
        cfg.workers = 7;
        const auto c = run_csv(cfg);
        out.check(a == b && a == c, fmt::format("{}: {} bytes identical for 1, 4 and 7 workers", name, a.size()));
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cubeperc acceptance suite"};
    int only = 0;
    unsigned workers = 0;
    app.add_option("--only", only, "run a single criterion (1-13)");
    app.add_option("--workers", workers, "worker threads (0 = all cores)");
    CLI11_PARSE(app, argc, argv);

    const std::vector<Criterion> criteria{
        {1, "oracle equivalence", 10, c1_oracle},
        {2, "known counts", 10, c2_known},
        {3, "expectation identity", 120, c3_expectation},
        {4, "moment formulas", 30, c4_moments},
        {5, "variance and covariance", 300, c5_variance},
        {6, "supercritical CLT", 1200, c6_clt},
        {7, "critical log-normal sum", 1200, c7_critical},
        {8, "birthday theta concentration", 300, c8_theta},
        {9, "collision law", 900, c9_collision},
        {10, "defect-size Poisson law", 600, c10_defect},
        {11, "sampler fidelity", 300, c11_samplers},
        {12, "Poisson tails and TV", 10, c12_poisson},
        {13, "determinism", 600, c13_determinism},
    };

    bool all = true;
    for (const auto& c : criteria) {
        if (only && c.id != only) continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.run(workers);
        } catch (const std::exception& e) {
            out.check(false, std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        out.check(secs < c.budget_seconds, fmt::format("runtime {:.1f} s (budget {:g} s)", secs, c.budget_seconds));
        for (const auto& n : out.notes) std::cout << "    " << n << '\n';
        std::cout << fmt::format("{} criterion {:2d}: {}\n", out.pass ? "PASS" : "FAIL", c.id, c.title) << std::flush;
        all = all && out.pass;
    }
    return all ? 0 : 1;
}
