#include "cubeperc/exact.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>

namespace cubeperc {

namespace {

/// Degrees into S of the Q_d neighbors of S, one entry per neighbor.
std::vector<int> neighbor_degrees(CubeDim dim, std::span<const Vertex> members) {
    std::vector<Vertex> nbrs;
    nbrs.reserve(members.size() * static_cast<std::size_t>(dim.value()));
    for (Vertex v : members)
        for (int c = 0; c < dim.value(); ++c) nbrs.push_back(v ^ (Vertex{1} << c));
    std::sort(nbrs.begin(), nbrs.end());
    std::vector<int> degs;
    for (std::size_t i = 0; i < nbrs.size();) {
        std::size_t j = i;
        while (j < nbrs.size() && nbrs[j] == nbrs[i]) ++j;
        degs.push_back(static_cast<int>(j - i));
        i = j;
    }
    return degs;
}

double omega_product(int d, double p, std::span<const int> degs) {
    std::vector<double> factor(static_cast<std::size_t>(d) + 1);
    for (int k = 0; k <= d; ++k) factor[k] = 0.5 * (1.0 + std::pow(1.0 - p, k));
    double prod = 1.0;
    for (int k : degs) prod *= factor[k];
    return prod;
}

double omega_explicit(double p, std::span<const int> degs) {
    const auto m = degs.size();
    if (m > static_cast<std::size_t>(kOmegaExplicitMaxNeighbors))
        throw InfeasibleError("explicit omega sum needs |N(S)| <= 24");
    const double q = 1.0 - p;
    // Σ_B (1-p)^{E(S,B)} by a Gray walk over B ⊆ N(S), tracking the exponent.
    int exponent = 0;
    int max_exp = 0;
    for (int k : degs) max_exp += k;
    std::vector<double> qpow(static_cast<std::size_t>(max_exp) + 1);
    for (int e = 0; e <= max_exp; ++e) qpow[e] = std::pow(q, e);
    CompensatedSum sum;
    sum.add(1.0);
    std::uint64_t b = 0;
    const std::uint64_t total = std::uint64_t{1} << m;
    for (std::uint64_t i = 1; i < total; ++i) {
        const int r = std::countr_zero(i);
        b ^= std::uint64_t{1} << r;
        exponent += (b >> r) & 1u ? degs[r] : -degs[r];
        sum.add(qpow[exponent]);
    }
    return std::ldexp(sum.value(), -static_cast<int>(m));
}

double log_sum_exp(const std::vector<double>& terms) {
    double top = -INFINITY;
    for (double t : terms) top = std::max(top, t);
    if (!std::isfinite(top)) return top;
    CompensatedSum s;
    for (double t : terms) s.add(std::exp(t - top));
    return top + std::log(s.value());
}

double log_binomial(std::uint32_t n, std::uint32_t k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

void require_dim(const PercolationInstance& inst, int limit, const char* what) {
    if (inst.d() > limit)
        throw InfeasibleError(std::string(what) + " is limited to d <= " + std::to_string(limit));
}

}  // namespace

SubsetHistogram subset_histogram(const PercolationInstance& inst) {
    SubsetHistogram h;
    h.half = static_cast<std::uint32_t>(inst.dim().side_size());
    const std::uint32_t stride = h.half + 1;
    h.counts.assign(static_cast<std::size_t>(stride) * stride, 0);
    sweep_even_subsets(inst, [&](std::uint64_t, std::uint32_t s, std::uint32_t n) { ++h.counts[s * stride + n]; });
    return h;
}

ExactPartition exact_partition(const PercolationInstance& inst) {
    require_dim(inst, kExactPartitionMaxDim, "exact_partition");
    const auto hist = subset_histogram(inst);
    BigInt z = 0;
    for (std::uint32_t s = 0; s <= hist.half; ++s)
        for (std::uint32_t n = 0; n <= hist.half; ++n)
            if (const auto c = hist.at(s, n)) z += BigInt(c) << (hist.half - n);
    ExactPartition out{inst.d(), inst.p(), inst.seed(), 1.0, 0.0, z};
    // Z <= 2^(2^d) <= 2^64; the conversion rounds to the nearest double.
    out.log_z = std::log(z.convert_to<double>());
    return out;
}

ExactPartition exact_partition_hardcore(const PercolationInstance& inst, double lambda) {
    require_dim(inst, kExactPartitionMaxDim, "exact_partition_hardcore");
    return exact_partition_hardcore(inst, subset_histogram(inst), lambda);
}

ExactPartition exact_partition_hardcore(const PercolationInstance& inst, const SubsetHistogram& hist,
                                        double lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw DomainError("fugacity lambda must be positive");
    const double log_l = std::log(lambda);
    const double log_free = std::log1p(lambda);
    std::vector<double> terms;
    for (std::uint32_t s = 0; s <= hist.half; ++s)
        for (std::uint32_t n = 0; n <= hist.half; ++n)
            if (const auto c = hist.at(s, n))
                terms.push_back(std::log(static_cast<double>(c)) + s * log_l + (hist.half - n) * log_free);
    return ExactPartition{inst.d(), inst.p(), inst.seed(), lambda, log_sum_exp(terms), std::nullopt};
}

std::vector<std::uint64_t> naive_size_counts(const PercolationInstance& inst) {
    require_dim(inst, kNaiveMaxDim, "naive_partition");
    const auto nv = static_cast<std::uint32_t>(inst.dim().vertex_count());
    std::vector<std::uint32_t> adj(nv, 0);
    for (Vertex v = 0; v < nv; ++v) {
        std::uint32_t coords = inst.open_coords(v);
        while (coords) {
            adj[v] |= std::uint32_t{1} << (v ^ (Vertex{1} << std::countr_zero(coords)));
            coords &= coords - 1;
        }
    }
    std::vector<std::uint64_t> counts(nv + 1, 0);
    const std::uint64_t total = std::uint64_t{1} << nv;
    for (std::uint64_t m = 0; m < total; ++m) {
        const auto mask = static_cast<std::uint32_t>(m);
        bool independent = true;
        for (std::uint32_t rest = mask; rest && independent; rest &= rest - 1)
            independent = (adj[std::countr_zero(rest)] & mask) == 0;
        if (independent) ++counts[std::popcount(mask)];
    }
    return counts;
}

double naive_partition(const PercolationInstance& inst, double lambda) {
    const auto counts = naive_size_counts(inst);
    CompensatedSum z;
    for (std::size_t k = 0; k < counts.size(); ++k)
        if (counts[k]) z.add(static_cast<double>(counts[k]) * std::pow(lambda, static_cast<double>(k)));
    return z.value();
}

std::uint64_t naive_count(const PercolationInstance& inst) {
    std::uint64_t z = 0;
    for (auto c : naive_size_counts(inst)) z += c;
    return z;
}

double expected_partition(int d, double p) {
    const CubeDim dim{d};
    if (d > kExactDefectMaxDim) throw InfeasibleError("expected_partition is limited to d <= 5");
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("edge probability must lie in [0, 1]");
    const auto half = static_cast<std::uint32_t>(dim.side_size());
    std::vector<double> factor(static_cast<std::size_t>(d) + 1);
    for (int k = 0; k <= d; ++k) factor[k] = 0.5 * (1.0 + std::pow(1.0 - p, k));
    std::vector<int> deg(half, 0);
    CompensatedSum sum;
    sum.add(1.0);
    std::uint64_t mask = 0;
    const std::uint64_t total = std::uint64_t{1} << half;
    for (std::uint64_t i = 1; i < total; ++i) {
        const int r = std::countr_zero(i);
        mask ^= std::uint64_t{1} << r;
        const int step = (mask >> r) & 1u ? 1 : -1;
        const Vertex v = vertex_at(Parity::Even, static_cast<Rank>(r));
        for (int c = 0; c < d; ++c) deg[parity_rank(v ^ (Vertex{1} << c))] += step;
        double prod = 1.0;
        for (int k : deg) prod *= factor[k];
        sum.add(prod);
    }
    return std::ldexp(sum.value(), static_cast<int>(half));
}

double omega(int d, double p, const ParitySet& s, const ParitySet& b) {
    const CubeDim dim{d};
    if (s.dim() != dim || b.dim() != dim) throw DimensionError("omega: sets belong to a different cube");
    if (b.parity() != opposite(s.parity())) throw DomainError("omega: B must lie on the side opposite S");
    const auto nbhd = full_neighborhood(dim, s);
    int edges = 0;
    for (Vertex u : b.members()) {
        if (!nbhd.contains(u)) throw DomainError("omega: B is not contained in N(S)");
        for (int c = 0; c < d; ++c) edges += s.contains(u ^ (Vertex{1} << c)) ? 1 : 0;
    }
    return std::ldexp(std::pow(1.0 - p, edges), -static_cast<int>(nbhd.size()));
}

double omega_total(int d, double p, const ParitySet& s, OmegaMethod method) {
    const CubeDim dim{d};
    if (s.dim() != dim) throw DimensionError("omega_total: set belongs to a different cube");
    const auto members = s.members();
    const auto degs = neighbor_degrees(dim, members);
    return method == OmegaMethod::Product ? omega_product(d, p, degs) : omega_explicit(p, degs);
}

DefectPmf defect_distribution_exact(const PercolationInstance& inst) {
    require_dim(inst, kExactDefectMaxDim, "defect_distribution_exact");
    return defect_distribution_exact(inst, subset_histogram(inst));
}

DefectPmf defect_distribution_exact(const PercolationInstance&, const SubsetHistogram& hist) {
    const std::uint32_t half = hist.half;
    std::vector<double> zterms;
    for (std::uint32_t s = 0; s <= half; ++s)
        for (std::uint32_t n = 0; n <= half; ++n)
            if (const auto c = hist.at(s, n))
                zterms.push_back(std::log(static_cast<double>(c)) + (half - n) * std::numbers::ln2);
    const double log_z = log_sum_exp(zterms);

    std::vector<CompensatedSum> acc(half + 1);
    for (std::uint32_t s = 0; s <= half; ++s)
        for (std::uint32_t n = 0; n <= half; ++n) {
            const auto c = hist.at(s, n);
            if (!c) continue;
            const double log_c = std::log(static_cast<double>(c)) - log_z;
            const std::uint32_t free = half - n;
            for (std::uint32_t j = 0; j <= free; ++j)
                acc[std::min(s, j)].add(std::exp(log_c + log_binomial(free, j)));
        }
    DefectPmf out;
    out.probs.reserve(half + 1);
    for (auto& a : acc) out.probs.push_back(a.value());
    return out;
}

double scaled_count(const ExactPartition& z, const TheoryConstants& consts) {
    const double half = std::ldexp(1.0, z.d - 1);
    return std::exp(z.log_z - half * std::log1p(z.lambda) - std::numbers::ln2 - consts.mu);
}

double scaled_count(const PercolationInstance& inst, double lambda, const TheoryConstants& consts) {
    return scaled_count(lambda == 1.0 ? exact_partition(inst) : exact_partition_hardcore(inst, lambda), consts);
}

double scaled_count_proxy(const PhiPair& phis, const TheoryConstants& consts) {
    return consts.zeta * 0.5 * (std::exp(phis.phi_even - consts.mu) + std::exp(phis.phi_odd - consts.mu));
}

DimerCensus dimer_census(int d, double p) {
    const CubeDim dim{d};
    if (d > kCensusMaxDim) throw DimensionError("dimer_census is limited to d <= 12");
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("edge probability must lie in [0, 1]");
    DimerCensus out{d, p, 0, 0.0};
    CompensatedSum sum;
    const auto half = static_cast<Rank>(dim.side_size());
    for (Rank r = 0; r < half; ++r) {
        const Vertex u = vertex_at(Parity::Even, r);
        for (int i = 0; i < d; ++i)
            for (int j = i + 1; j < d; ++j) {
                const Vertex v = u ^ (Vertex{1} << i) ^ (Vertex{1} << j);
                if (v < u) continue;
                const Vertex pair[2] = {u, v};
                sum.add(omega_product(d, p, neighbor_degrees(dim, pair)));
                ++out.pair_count;
            }
    }
    out.census = sum.value();
    return out;
}

std::string to_string(const BigInt& z) { return z.str(); }

}  // namespace cubeperc
