#pragma once

// Independent-set samplers: the two-stage ApproxSampler (symmetric and tilted
// side choice), the exact uniform sampler at small d, and exact laws of both
// for total-variation comparisons.

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "cubeperc/exact.hpp"
#include "cubeperc/hypercube.hpp"
#include "cubeperc/rng.hpp"
#include "cubeperc/weights.hpp"

namespace cubeperc {

enum class SamplerVariant : std::uint8_t { Symmetric, Tilted };

const char* to_string(SamplerVariant v) noexcept;
SamplerVariant parse_variant(const std::string& s);

struct SampleRecord {
    IndependentSet set;
    Parity chosen_side = Parity::Even;
    std::uint64_t s1_size = 0;
    std::uint64_t s2_size = 0;
    std::uint64_t defect_size = 0;
};

/// Choose H (fair coin, or P(H) ∝ e^{Φ_H}); keep each v ∈ H with probability
/// φ_v / (1 + φ_v); then keep each vertex of H^c outside N_p(S₁) with
/// probability λ / (1 + λ). At λ = 1 these are 2^{-N_p(v)} / (1 + 2^{-N_p(v)})
/// and 1/2. The instance must outlive the sampler.
class ApproxSampler {
  public:
    ApproxSampler(const PercolationInstance& inst, double lambda, SamplerVariant variant);

    const PercolationInstance& instance() const noexcept { return *inst_; }
    double lambda() const noexcept { return lambda_; }
    SamplerVariant variant() const noexcept { return variant_; }
    const PhiPair& phis() const noexcept { return phis_; }
    /// P(H = Even).
    double even_probability() const noexcept { return p_even_; }
    /// Inclusion probability of a degree-k vertex in step 2.
    double keep_probability(int degree) const noexcept { return keep_[static_cast<std::size_t>(degree)]; }

    SampleRecord sample(Xoshiro256ss& rng) const;

  private:
    struct SideClasses {
        std::vector<std::uint64_t> offsets;  ///< per open degree
        std::vector<Rank> members;
    };

    const PercolationInstance* inst_;
    double lambda_;
    SamplerVariant variant_;
    PhiPair phis_;
    double p_even_ = 0.5;
    std::vector<double> keep_;
    std::array<SideClasses, 2> classes_;
};

inline SampleRecord approx_sample(const PercolationInstance& inst, double lambda, SamplerVariant variant,
                                  Xoshiro256ss& rng) {
    return ApproxSampler(inst, lambda, variant).sample(rng);
}

inline constexpr int kUniformSamplerMaxDim = 5;

/// Exactly uniform independent sets: S₁ ⊆ Even with probability ∝ 2^{2^{d-1} - N_p(S₁)},
/// then a uniform subset of Odd \ N_p(S₁). d <= 5.
class UniformSampler {
  public:
    explicit UniformSampler(const PercolationInstance& inst);

    /// Number of independent sets.
    std::uint64_t total() const noexcept { return cumulative_.back(); }
    SampleRecord sample(Xoshiro256ss& rng) const;

  private:
    const PercolationInstance* inst_;
    std::vector<std::uint64_t> cumulative_;  ///< by even rank mask
    std::vector<std::uint32_t> blocked_;      ///< odd-rank mask of N_p(S) by even rank mask
};

inline SampleRecord uniform_sample_exact(const PercolationInstance& inst, Xoshiro256ss& rng) {
    return UniformSampler(inst).sample(rng);
}

/// (even rank mask, odd rank mask).
using SetKey = std::pair<std::uint64_t, std::uint64_t>;
using SetPmf = std::map<SetKey, double>;

inline constexpr int kSetPmfMaxDim = 4;

/// Exact law of ApproxSampler; d <= 4.
SetPmf approx_distribution_exact(const PercolationInstance& inst, double lambda, SamplerVariant variant);
/// Hard-core law λ^{|I|} / Z_λ on independent sets; d <= 4.
SetPmf hardcore_distribution_exact(const PercolationInstance& inst, double lambda);
/// Uniform law on independent sets; d <= 4.
SetPmf uniform_distribution_exact(const PercolationInstance& inst);

double tv_distance(const SetPmf& a, const SetPmf& b);

/// TV between ApproxSampler(λ) and its target: uniform at λ = 1, hard-core(λ) otherwise.
double tv_samplers_exact(const PercolationInstance& inst, double lambda, SamplerVariant variant);

inline constexpr std::size_t kMinHistogramSamples = 1000;

/// Empirical pmf of defect_size; needs at least 1000 samples.
DefectPmf defect_histogram(std::span<const SampleRecord> samples);
/// Empirical pmf of s1_size; needs at least 1000 samples.
DefectPmf s1_histogram(std::span<const SampleRecord> samples);

}  // namespace cubeperc
