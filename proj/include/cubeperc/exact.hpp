#pragma once

// Enumeration-based ground truth at small d.
//
// Every independent set I of the percolated cube splits as S = I ∩ Even and
// I ∩ Odd ⊆ Odd \ N_p(S), so Z = Σ_{S ⊆ Even} 2^{2^{d-1} - N_p(S)} and the
// hard-core analogue weights S by λ^{|S|} (1 + λ)^{2^{d-1} - N_p(S)}. All
// quantities below are functions of the joint histogram of (|S|, N_p(S))
// over the even-side subsets, which one Gray-code sweep produces.

#include <bit>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "cubeperc/hypercube.hpp"
#include "cubeperc/weights.hpp"

namespace cubeperc {

using BigInt = boost::multiprecision::cpp_int;

inline constexpr int kExactPartitionMaxDim = 6;
inline constexpr int kExactDefectMaxDim = 5;
inline constexpr int kNaiveMaxDim = 4;

/// Visits every S ⊆ Even in Gray-code order (starting from ∅) and calls
/// fn(rank_mask, |S|, N_p(S)). Neighborhood sizes are maintained through
/// per-odd-vertex counters of open edges into S. Requires d <= 6.
template <class Fn>
void sweep_even_subsets(const PercolationInstance& inst, Fn&& fn) {
    const int d = inst.d();
    if (d > kExactPartitionMaxDim)
        throw InfeasibleError("even-side subset sweep needs d <= 6 (2^(2^(d-1)) subsets)");
    const auto half = static_cast<std::uint32_t>(inst.dim().side_size());
    // Odd-side ranks of the open neighbors of each even vertex.
    std::vector<std::uint32_t> nbr_start(half + 1, 0);
    std::vector<std::uint32_t> nbr;
    for (Rank r = 0; r < half; ++r) {
        const Vertex v = vertex_at(Parity::Even, r);
        std::uint32_t field = inst.even_edge_field(r);
        while (field) {
            const int c = std::countr_zero(field);
            field &= field - 1;
            nbr.push_back(parity_rank(v ^ (Vertex{1} << c)));
        }
        nbr_start[r + 1] = static_cast<std::uint32_t>(nbr.size());
    }
    std::vector<std::uint8_t> hits(half, 0);
    std::uint64_t mask = 0;
    std::uint32_t size = 0, nsize = 0;
    fn(mask, size, nsize);
    const std::uint64_t total = std::uint64_t{1} << half;
    for (std::uint64_t i = 1; i < total; ++i) {
        const int r = std::countr_zero(i);
        const std::uint64_t bit = std::uint64_t{1} << r;
        mask ^= bit;
        if (mask & bit) {
            ++size;
            for (auto k = nbr_start[r]; k < nbr_start[r + 1]; ++k)
                if (hits[nbr[k]]++ == 0) ++nsize;
        } else {
            --size;
            for (auto k = nbr_start[r]; k < nbr_start[r + 1]; ++k)
                if (--hits[nbr[k]] == 0) --nsize;
        }
        fn(mask, size, nsize);
    }
}

/// counts[s][n] = #{S ⊆ Even : |S| = s, N_p(S) = n}, flattened with stride half + 1.
struct SubsetHistogram {
    std::uint32_t half = 0;
    std::vector<std::uint64_t> counts;

    std::uint64_t at(std::uint32_t s, std::uint32_t n) const { return counts[s * (half + 1) + n]; }
};

SubsetHistogram subset_histogram(const PercolationInstance& inst);

struct ExactPartition {
    int d = 0;
    double p = 0.0;
    std::uint64_t seed = 0;
    double lambda = 1.0;
    double log_z = 0.0;
    /// Set on the λ = 1 path only.
    std::optional<BigInt> z_integer;
};

/// Number of independent sets; d <= 6.
ExactPartition exact_partition(const PercolationInstance& inst);
/// log Σ_I λ^{|I|}; d <= 6.
ExactPartition exact_partition_hardcore(const PercolationInstance& inst, double lambda);
ExactPartition exact_partition_hardcore(const PercolationInstance& inst, const SubsetHistogram& hist,
                                        double lambda);

/// Independent sets of the open graph counted by size, by brute force over
/// all 2^(2^d) vertex subsets; d <= 4.
std::vector<std::uint64_t> naive_size_counts(const PercolationInstance& inst);
/// Σ_I λ^{|I|} from naive_size_counts.
double naive_partition(const PercolationInstance& inst, double lambda = 1.0);
std::uint64_t naive_count(const PercolationInstance& inst);

/// E[Z_{d,p}] = 2^{2^{d-1}} Σ_{S ⊆ Even} Π_{u ∈ N(S)} (1 + (1-p)^{deg_S(u)}) / 2; d <= 5.
///
/// The product form holds because u ∈ N_p(S) iff one of its deg_S(u) edges into
/// S is open, and these events involve disjoint edge sets for distinct u.
double expected_partition(int d, double p);

/// ω(S, B) = 2^{-|N(S)|} (1-p)^{E(S,B)}. Throws DomainError unless B ⊆ N(S).
double omega(int d, double p, const ParitySet& s, const ParitySet& b);

enum class OmegaMethod { Product, ExplicitSum };

inline constexpr int kOmegaExplicitMaxNeighbors = 24;

/// ω(S) = Σ_{B ⊆ N(S)} ω(S, B) = E[2^{-N_p(S)}]. The explicit sum needs |N(S)| <= 24.
double omega_total(int d, double p, const ParitySet& s, OmegaMethod method = OmegaMethod::Product);

struct DefectPmf {
    std::vector<double> probs;  ///< index k = 0..2^{d-1}
};

/// Law of min(|I ∩ Even|, |I ∩ Odd|) for I uniform over independent sets; d <= 5.
DefectPmf defect_distribution_exact(const PercolationInstance& inst);
DefectPmf defect_distribution_exact(const PercolationInstance& inst, const SubsetHistogram& hist);

/// exp(log Z - 2^{d-1} log(1+λ) - log 2 - μ).
double scaled_count(const ExactPartition& z, const TheoryConstants& consts);
double scaled_count(const PercolationInstance& inst, double lambda, const TheoryConstants& consts);
/// ζ (e^{Φ_E - μ} + e^{Φ_O - μ}) / 2.
double scaled_count_proxy(const PhiPair& phis, const TheoryConstants& consts);

inline constexpr int kCensusMaxDim = 12;

struct DimerCensus {
    int d = 0;
    double p = 0.0;
    std::uint64_t pair_count = 0;
    double census = 0.0;
};

/// Σ of ω(γ) over unordered even pairs γ at Hamming distance 2; d <= 12.
DimerCensus dimer_census(int d, double p);

std::string to_string(const BigInt& z);

}  // namespace cubeperc
