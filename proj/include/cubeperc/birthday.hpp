#pragma once

// The non-uniform birthday problem under π(v) ∝ φ_v on one side of the cube.

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "cubeperc/hypercube.hpp"
#include "cubeperc/rng.hpp"

namespace cubeperc {

/// Walker/Vose alias table over a finite list of nonnegative weights.
class AliasTable {
  public:
    AliasTable() = default;
    explicit AliasTable(const std::vector<double>& weights);

    std::size_t size() const noexcept { return prob_.size(); }

    template <class Rng>
    std::size_t draw(Rng& rng) const {
        const std::size_t i = uniform_below(rng, prob_.size());
        return uniform01(rng) < prob_[i] ? i : alias_[i];
    }

  private:
    std::vector<double> prob_;
    std::vector<std::uint32_t> alias_;
};

/// π on one side. Vertices sharing a weight form a class; a draw picks a class
/// from an alias table over class masses, then a uniform member of it. For a
/// percolation instance the classes are the open-degree classes, so memory is
/// one rank per vertex and draws are O(1).
class WeightMeasure {
  public:
    WeightMeasure(CubeDim dim, Parity side, const std::vector<double>& weights);

    CubeDim dim() const noexcept { return dim_; }
    Parity side() const noexcept { return side_; }
    /// Φ = Σ φ_v.
    double total() const noexcept { return s1_; }
    double sum_squares() const noexcept { return s2_; }
    double sum_cubes() const noexcept { return s3_; }

    double weight(Rank r) const noexcept { return class_weight_[class_of_[r]]; }
    std::vector<double> weights() const;

    template <class Rng>
    Vertex draw(Rng& rng) const {
        const std::size_t c = classes_.draw(rng);
        const std::uint64_t lo = offsets_[c];
        const std::uint64_t hi = offsets_[c + 1];
        return vertex_at(side_, members_[lo + uniform_below(rng, hi - lo)]);
    }

  private:
    friend WeightMeasure build_measure(const PercolationInstance&, Parity, double);
    WeightMeasure(CubeDim dim, Parity side) : dim_(dim), side_(side) {}
    void finish(std::vector<std::uint64_t> class_sizes);

    CubeDim dim_;
    Parity side_;
    std::vector<double> class_weight_;
    std::vector<std::uint8_t> class_of_;
    std::vector<std::uint64_t> offsets_;
    std::vector<Rank> members_;
    AliasTable classes_;
    double s1_ = 0.0;
    double s2_ = 0.0;
    double s3_ = 0.0;
};

/// d <= 28.
WeightMeasure build_measure(const PercolationInstance& inst, Parity side, double lambda = 1.0);

struct BirthdayOutcome {
    std::uint64_t n = 0;
    std::uint64_t n_repeat = 0;
    std::uint64_t n_neighbor = 0;
    std::uint64_t n_collide = 0;
};

/// Pair counts among the given draws. Small batches compare every pair; larger
/// ones sort and probe the C(d,2) distance-2 partners of each distinct value.
BirthdayOutcome count_collisions(CubeDim dim, std::vector<Vertex> draws);
BirthdayOutcome count_collisions_pairwise(std::span<const Vertex> draws);
BirthdayOutcome count_collisions_sorted(CubeDim dim, std::vector<Vertex> draws);

template <class Rng>
BirthdayOutcome draw_birthday(const WeightMeasure& m, std::uint64_t n, Rng& rng) {
    if (n < 2) throw DomainError("birthday draws need n >= 2");
    std::vector<Vertex> draws(n);
    for (auto& x : draws) x = m.draw(rng);
    return count_collisions(m.dim(), std::move(draws));
}

/// C(n,2) Σφ² / Φ².
double theta(const WeightMeasure& m, std::uint64_t n);

struct SteinDiagnostics {
    double y1 = 0.0;
    double y2 = 0.0;
    double y3 = 0.0;
};

inline constexpr int kSteinMaxDim = 20;

/// y1 = n² Σ_{u ∼₂ v} φ_u φ_v / Φ² over unordered 2-neighbor pairs,
/// y2 = n³ Σφ³ / Φ³, y3 = n³ (Σφ² / Φ²)². Requires d <= 20.
SteinDiagnostics stein_diagnostics(const WeightMeasure& m, std::uint64_t n);

/// Aggregate of repeated birthday experiments on one measure.
struct BirthdayRun {
    std::uint64_t trials = 0;
    double mean_repeat = 0.0;
    double mean_neighbor = 0.0;
    double mean_collide = 0.0;
    double p_no_collision = 0.0;
    std::vector<double> collide_pmf;
    std::vector<double> repeat_pmf;
};

template <class Rng>
BirthdayRun run_birthday(const WeightMeasure& m, std::uint64_t n, std::uint64_t trials, Rng& rng) {
    BirthdayRun out;
    out.trials = trials;
    std::vector<std::uint64_t> collide, repeat;
    std::uint64_t none = 0;
    double sr = 0, sn = 0, sc = 0;
    for (std::uint64_t t = 0; t < trials; ++t) {
        const auto o = draw_birthday(m, n, rng);
        if (o.n_collide >= collide.size()) collide.resize(o.n_collide + 1, 0);
        if (o.n_repeat >= repeat.size()) repeat.resize(o.n_repeat + 1, 0);
        ++collide[o.n_collide];
        ++repeat[o.n_repeat];
        none += o.n_collide == 0;
        sr += static_cast<double>(o.n_repeat);
        sn += static_cast<double>(o.n_neighbor);
        sc += static_cast<double>(o.n_collide);
    }
    const auto tt = static_cast<double>(trials);
    out.mean_repeat = sr / tt;
    out.mean_neighbor = sn / tt;
    out.mean_collide = sc / tt;
    out.p_no_collision = static_cast<double>(none) / tt;
    for (auto c : collide) out.collide_pmf.push_back(static_cast<double>(c) / tt);
    for (auto c : repeat) out.repeat_pmf.push_back(static_cast<double>(c) / tt);
    return out;
}

struct CollisionEstimate {
    double value = 0.0;
    double std_error = 0.0;
};

/// Fraction of trials with at least one collision; trials >= 100.
template <class Rng>
CollisionEstimate collision_probability_mc(const WeightMeasure& m, std::uint64_t n, std::uint64_t trials,
                                           Rng& rng) {
    if (trials < 100) throw DomainError("collision_probability_mc needs at least 100 trials");
    const auto run = run_birthday(m, n, trials, rng);
    const double q = 1.0 - run.p_no_collision;
    return {q, std::sqrt(q * (1.0 - q) / static_cast<double>(trials))};
}

/// Empirical pmf of N_Collide; trials >= 1000.
template <class Rng>
std::vector<double> collision_pmf_empirical(const WeightMeasure& m, std::uint64_t n, std::uint64_t trials,
                                            Rng& rng) {
    if (trials < 1000) throw DomainError("collision_pmf_empirical needs at least 1000 trials");
    return run_birthday(m, n, trials, rng).collide_pmf;
}

}  // namespace cubeperc
