#include "cubeperc/samplers.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace cubeperc {

namespace {

void check_lambda(double lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw DomainError("fugacity lambda must be positive");
}

/// Odd-side rank masks of the open neighbors of each vertex on `side` (d <= 5).
std::vector<std::uint32_t> neighbor_masks(const PercolationInstance& inst, Parity side) {
    const auto half = static_cast<Rank>(inst.dim().side_size());
    std::vector<std::uint32_t> out(half, 0);
    for (Rank r = 0; r < half; ++r) {
        const Vertex v = vertex_at(side, r);
        for (std::uint32_t f = inst.open_coords(v); f; f &= f - 1)
            out[r] |= std::uint32_t{1} << parity_rank(v ^ (Vertex{1} << std::countr_zero(f)));
    }
    return out;
}

/// blocked[mask] = rank mask of N_p(S) for the subset S with the given rank mask.
std::vector<std::uint32_t> blocked_table(const std::vector<std::uint32_t>& nbr) {
    const std::size_t total = std::size_t{1} << nbr.size();
    std::vector<std::uint32_t> blocked(total, 0);
    for (std::size_t m = 1; m < total; ++m)
        blocked[m] = blocked[m & (m - 1)] | nbr[static_cast<std::size_t>(std::countr_zero(m))];
    return blocked;
}

void require_dim(const PercolationInstance& inst, int limit, const char* what) {
    if (inst.d() > limit)
        throw InfeasibleError(std::string(what) + " is limited to d <= " + std::to_string(limit));
}

SampleRecord make_record(IndependentSet set, Parity chosen) {
    SampleRecord rec{std::move(set), chosen, 0, 0, 0};
    rec.s1_size = rec.set.side(chosen).size();
    rec.s2_size = rec.set.side(opposite(chosen)).size();
    rec.defect_size = std::min(rec.set.even.size(), rec.set.odd.size());
    return rec;
}

DefectPmf histogram(std::span<const SampleRecord> samples, std::uint64_t SampleRecord::*field) {
    if (samples.size() < kMinHistogramSamples) throw DomainError("histograms need at least 1000 samples");
    std::uint64_t top = 0;
    for (const auto& s : samples) top = std::max(top, s.*field);
    DefectPmf out;
    out.probs.assign(top + 1, 0.0);
    for (const auto& s : samples) out.probs[s.*field] += 1.0;
    for (auto& x : out.probs) x /= static_cast<double>(samples.size());
    return out;
}

}  // namespace

const char* to_string(SamplerVariant v) noexcept { return v == SamplerVariant::Tilted ? "tilted" : "symmetric"; }

SamplerVariant parse_variant(const std::string& s) {
    if (s == "symmetric") return SamplerVariant::Symmetric;
    if (s == "tilted") return SamplerVariant::Tilted;
    throw DomainError("unknown sampler variant '" + s + "' (expected symmetric|tilted)");
}

// --- ApproxSampler ------------------------------------------------------------

ApproxSampler::ApproxSampler(const PercolationInstance& inst, double lambda, SamplerVariant variant)
    : inst_(&inst), lambda_(lambda), variant_(variant) {
    check_lambda(lambda);
    if (inst.d() > kPhiSweepMaxDim) throw DimensionError("ApproxSampler needs d <= 28");
    const int d = inst.d();
    keep_.resize(static_cast<std::size_t>(d) + 1);
    for (int k = 0; k <= d; ++k) {
        const double w = degree_weight(k, lambda);
        keep_[k] = w / (1.0 + w);
    }
    for (Parity side : {Parity::Even, Parity::Odd}) {
        const auto deg = inst.side_degrees(side);
        auto& cls = classes_[static_cast<std::size_t>(side)];
        std::vector<std::uint64_t> count(static_cast<std::size_t>(d) + 1, 0);
        CompensatedSum phi;
        for (auto k : deg) ++count[k];
        for (int k = 0; k <= d; ++k) phi.add(static_cast<double>(count[k]) * degree_weight(k, lambda));
        (side == Parity::Even ? phis_.phi_even : phis_.phi_odd) = phi.value();
        cls.offsets.assign(static_cast<std::size_t>(d) + 2, 0);
        for (int k = 0; k <= d; ++k) cls.offsets[k + 1] = cls.offsets[k] + count[k];
        auto cursor = cls.offsets;
        cls.members.resize(deg.size());
        for (Rank r = 0; r < deg.size(); ++r) cls.members[cursor[deg[r]]++] = r;
    }
    if (variant == SamplerVariant::Tilted) p_even_ = 1.0 / (1.0 + std::exp(phis_.phi_odd - phis_.phi_even));
}

SampleRecord ApproxSampler::sample(Xoshiro256ss& rng) const {
    const CubeDim dim = inst_->dim();
    const Parity h = uniform01(rng) < p_even_ ? Parity::Even : Parity::Odd;
    const Parity hc = opposite(h);

    // Step 2: independent inclusion within each open-degree class of H.
    ParitySet s1(dim, h);
    const auto& cls = classes_[static_cast<std::size_t>(h)];
    for (std::size_t k = 0; k + 1 < cls.offsets.size(); ++k) {
        const std::uint64_t size = cls.offsets[k + 1] - cls.offsets[k];
        std::uint64_t idx = geometric_skip(rng, keep_[k]);
        while (idx < size) {
            s1.insert_rank(cls.members[cls.offsets[k] + idx]);
            const std::uint64_t gap = geometric_skip(rng, keep_[k]);
            if (gap >= size) break;
            idx += 1 + gap;
        }
    }

    // Step 3: fill the unblocked part of H^c.
    const ParitySet blocked = open_neighborhood(*inst_, s1);
    ParitySet s2(dim, hc);
    const std::uint64_t side_size = dim.side_size();
    const double r = lambda_ / (1.0 + lambda_);
    if (r == 0.5) {
        auto out = s2.words();
        const auto blk = blocked.words();
        for (std::size_t w = 0; w < out.size(); ++w) out[w] = rng() & ~blk[w];
        if (side_size % 64) out.back() &= (std::uint64_t{1} << (side_size % 64)) - 1;
    } else {
        std::uint64_t pos = geometric_skip(rng, r);
        while (pos < side_size) {
            if (!blocked.contains_rank(static_cast<Rank>(pos))) s2.insert_rank(static_cast<Rank>(pos));
            const std::uint64_t gap = geometric_skip(rng, r);
            if (gap >= side_size) break;
            pos += 1 + gap;
        }
    }

    IndependentSet set(dim);
    set.side(h) = std::move(s1);
    set.side(hc) = std::move(s2);
    return make_record(std::move(set), h);
}

// --- UniformSampler -------------------------------------------------------------

UniformSampler::UniformSampler(const PercolationInstance& inst) : inst_(&inst) {
    require_dim(inst, kUniformSamplerMaxDim, "uniform_sample_exact");
    const auto half = static_cast<std::uint32_t>(inst.dim().side_size());
    blocked_ = blocked_table(neighbor_masks(inst, Parity::Even));
    cumulative_.resize(blocked_.size());
    std::uint64_t run = 0;
    for (std::size_t m = 0; m < blocked_.size(); ++m) {
        run += std::uint64_t{1} << (half - static_cast<std::uint32_t>(std::popcount(blocked_[m])));
        cumulative_[m] = run;
    }
}

SampleRecord UniformSampler::sample(Xoshiro256ss& rng) const {
    const CubeDim dim = inst_->dim();
    const std::uint64_t x = uniform_below(rng, total());
    const auto mask = static_cast<std::uint64_t>(
        std::upper_bound(cumulative_.begin(), cumulative_.end(), x) - cumulative_.begin());
    const auto full = static_cast<std::uint32_t>((std::uint64_t{1} << dim.side_size()) - 1);
    const std::uint64_t odd = rng() & ~static_cast<std::uint64_t>(blocked_[mask]) & full;
    IndependentSet set(ParitySet::from_rank_mask(dim, Parity::Even, mask),
                       ParitySet::from_rank_mask(dim, Parity::Odd, odd));
    return make_record(std::move(set), Parity::Even);
}

// --- exact laws -------------------------------------------------------------------

SetPmf approx_distribution_exact(const PercolationInstance& inst, double lambda, SamplerVariant variant) {
    require_dim(inst, kSetPmfMaxDim, "approx_distribution_exact");
    const ApproxSampler sampler(inst, lambda, variant);
    const auto half = static_cast<std::uint32_t>(inst.dim().side_size());
    const std::uint32_t full = (1u << half) - 1;
    const double r = lambda / (1.0 + lambda);
    SetPmf pmf;
    for (Parity h : {Parity::Even, Parity::Odd}) {
        const double ph = h == Parity::Even ? sampler.even_probability() : 1.0 - sampler.even_probability();
        if (ph == 0.0) continue;
        const auto deg = inst.side_degrees(h);
        const auto blocked = blocked_table(neighbor_masks(inst, h));
        for (std::uint32_t s1 = 0; s1 <= full; ++s1) {
            double p1 = ph;
            for (std::uint32_t v = 0; v < half; ++v) {
                const double q = sampler.keep_probability(deg[v]);
                p1 *= (s1 >> v) & 1u ? q : 1.0 - q;
            }
            const std::uint32_t free = full & ~blocked[s1];
            const int nfree = std::popcount(free);
            // Walk every submask of `free`, including the empty one.
            for (std::uint32_t s2 = free;; s2 = (s2 - 1) & free) {
                const int k = std::popcount(s2);
                const double p = p1 * std::pow(r, k) * std::pow(1.0 - r, nfree - k);
                const SetKey key = h == Parity::Even ? SetKey{s1, s2} : SetKey{s2, s1};
                pmf[key] += p;
                if (s2 == 0) break;
            }
        }
    }
    return pmf;
}

SetPmf hardcore_distribution_exact(const PercolationInstance& inst, double lambda) {
    require_dim(inst, kSetPmfMaxDim, "hardcore_distribution_exact");
    check_lambda(lambda);
    const auto half = static_cast<std::uint32_t>(inst.dim().side_size());
    const std::uint32_t full = (1u << half) - 1;
    const auto blocked = blocked_table(neighbor_masks(inst, Parity::Even));
    SetPmf pmf;
    CompensatedSum z;
    for (std::uint32_t s = 0; s <= full; ++s) {
        const std::uint32_t free = full & ~blocked[s];
        for (std::uint32_t t = free;; t = (t - 1) & free) {
            const double w = std::pow(lambda, std::popcount(s) + std::popcount(t));
            pmf[{s, t}] = w;
            z.add(w);
            if (t == 0) break;
        }
    }
    for (auto& [key, w] : pmf) w /= z.value();
    return pmf;
}

SetPmf uniform_distribution_exact(const PercolationInstance& inst) { return hardcore_distribution_exact(inst, 1.0); }

double tv_distance(const SetPmf& a, const SetPmf& b) {
    CompensatedSum s;
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() || ib != b.end()) {
        if (ib == b.end() || (ia != a.end() && ia->first < ib->first)) {
            s.add(std::fabs(ia->second));
            ++ia;
        } else if (ia == a.end() || ib->first < ia->first) {
            s.add(std::fabs(ib->second));
            ++ib;
        } else {
            s.add(std::fabs(ia->second - ib->second));
            ++ia;
            ++ib;
        }
    }
    return 0.5 * s.value();
}

double tv_samplers_exact(const PercolationInstance& inst, double lambda, SamplerVariant variant) {
    return tv_distance(approx_distribution_exact(inst, lambda, variant), hardcore_distribution_exact(inst, lambda));
}

DefectPmf defect_histogram(std::span<const SampleRecord> samples) {
    return histogram(samples, &SampleRecord::defect_size);
}

DefectPmf s1_histogram(std::span<const SampleRecord> samples) { return histogram(samples, &SampleRecord::s1_size); }

}  // namespace cubeperc
