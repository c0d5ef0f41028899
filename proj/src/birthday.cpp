#include "cubeperc/birthday.hpp"

#include <algorithm>
#include <map>

#include "cubeperc/weights.hpp"

namespace cubeperc {

AliasTable::AliasTable(const std::vector<double>& weights) {
    const std::size_t n = weights.size();
    if (n == 0) throw DomainError("alias table needs at least one weight");
    CompensatedSum total;
    for (double w : weights) {
        if (!(w >= 0.0) || !std::isfinite(w)) throw DomainError("alias weights must be finite and nonnegative");
        total.add(w);
    }
    if (!(total.value() > 0.0)) throw DomainError("alias weights must not all vanish");
    prob_.assign(n, 0.0);
    alias_.assign(n, 0);
    std::vector<double> scaled(n);
    std::vector<std::uint32_t> small, large;
    for (std::size_t i = 0; i < n; ++i) {
        scaled[i] = weights[i] * static_cast<double>(n) / total.value();
        (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));
    }
    while (!small.empty() && !large.empty()) {
        const auto s = small.back();
        small.pop_back();
        const auto l = large.back();
        prob_[s] = scaled[s];
        alias_[s] = l;
        scaled[l] = (scaled[l] + scaled[s]) - 1.0;
        if (scaled[l] < 1.0) {
            large.pop_back();
            small.push_back(l);
        }
    }
    // Leftovers carry mass 1 up to rounding.
    for (auto i : large) prob_[i] = 1.0, alias_[i] = i;
    for (auto i : small) prob_[i] = 1.0, alias_[i] = i;
}

WeightMeasure::WeightMeasure(CubeDim dim, Parity side, const std::vector<double>& weights)
    : dim_(dim), side_(side) {
    const auto n = dim.side_size();
    if (weights.size() != n) throw DomainError("measure needs one weight per vertex of the side");
    std::map<double, std::vector<Rank>> groups;
    for (Rank r = 0; r < n; ++r) {
        if (!(weights[r] >= 0.0) || !std::isfinite(weights[r]))
            throw DomainError("measure weights must be finite and nonnegative");
        groups[weights[r]].push_back(r);
    }
    if (groups.size() > 255) throw DomainError("measure supports at most 255 distinct weights");
    class_of_.assign(n, 0);
    std::vector<std::uint64_t> sizes;
    for (auto& [w, ranks] : groups) {
        const auto c = static_cast<std::uint8_t>(class_weight_.size());
        class_weight_.push_back(w);
        sizes.push_back(ranks.size());
        for (Rank r : ranks) {
            class_of_[r] = c;
            members_.push_back(r);
        }
    }
    finish(std::move(sizes));
}

void WeightMeasure::finish(std::vector<std::uint64_t> class_sizes) {
    offsets_.assign(class_sizes.size() + 1, 0);
    std::vector<double> mass(class_sizes.size());
    CompensatedSum a, b, c;
    for (std::size_t k = 0; k < class_sizes.size(); ++k) {
        offsets_[k + 1] = offsets_[k] + class_sizes[k];
        const double w = class_weight_[k];
        const auto count = static_cast<double>(class_sizes[k]);
        mass[k] = count * w;
        a.add(count * w);
        b.add(count * w * w);
        c.add(count * w * w * w);
    }
    s1_ = a.value();
    s2_ = b.value();
    s3_ = c.value();
    classes_ = AliasTable(mass);
}

std::vector<double> WeightMeasure::weights() const {
    std::vector<double> out(class_of_.size());
    for (std::size_t r = 0; r < out.size(); ++r) out[r] = class_weight_[class_of_[r]];
    return out;
}

WeightMeasure build_measure(const PercolationInstance& inst, Parity side, double lambda) {
    if (inst.d() > kPhiSweepMaxDim) throw DimensionError("build_measure needs d <= 28");
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw DomainError("fugacity lambda must be positive");
    WeightMeasure m(inst.dim(), side);
    m.class_of_ = inst.side_degrees(side);
    const int d = inst.d();
    std::vector<std::uint64_t> sizes(static_cast<std::size_t>(d) + 1, 0);
    for (auto k : m.class_of_) ++sizes[k];
    for (int k = 0; k <= d; ++k) m.class_weight_.push_back(degree_weight(k, lambda));
    std::vector<std::uint64_t> cursor(sizes.size() + 1, 0);
    for (std::size_t k = 0; k < sizes.size(); ++k) cursor[k + 1] = cursor[k] + sizes[k];
    m.members_.resize(m.class_of_.size());
    for (Rank r = 0; r < m.class_of_.size(); ++r) m.members_[cursor[m.class_of_[r]]++] = r;
    m.finish(std::move(sizes));
    return m;
}

BirthdayOutcome count_collisions_pairwise(std::span<const Vertex> draws) {
    BirthdayOutcome out;
    out.n = draws.size();
    for (std::size_t i = 0; i < draws.size(); ++i)
        for (std::size_t j = i + 1; j < draws.size(); ++j) {
            const Vertex x = draws[i] ^ draws[j];
            const Vertex y = x & (x - 1);
            out.n_repeat += x == 0;
            out.n_neighbor += y != 0 && (y & (y - 1)) == 0;
        }
    out.n_collide = out.n_repeat + out.n_neighbor;
    return out;
}

BirthdayOutcome count_collisions_sorted(CubeDim dim, std::vector<Vertex> draws) {
    BirthdayOutcome out;
    out.n = draws.size();
    std::sort(draws.begin(), draws.end());
    std::vector<Vertex> values;
    std::vector<std::uint64_t> counts;
    for (std::size_t i = 0; i < draws.size();) {
        std::size_t j = i;
        while (j < draws.size() && draws[j] == draws[i]) ++j;
        values.push_back(draws[i]);
        counts.push_back(j - i);
        out.n_repeat += (j - i) * (j - i - 1) / 2;
        i = j;
    }
    const int d = dim.value();
    for (std::size_t k = 0; k < values.size(); ++k) {
        const Vertex u = values[k];
        for (int a = 0; a < d; ++a)
            for (int b = a + 1; b < d; ++b) {
                const Vertex v = u ^ (Vertex{1} << a) ^ (Vertex{1} << b);
                if (v < u) continue;
                const auto it = std::lower_bound(values.begin() + static_cast<std::ptrdiff_t>(k), values.end(), v);
                if (it != values.end() && *it == v) out.n_neighbor += counts[k] * counts[it - values.begin()];
            }
    }
    out.n_collide = out.n_repeat + out.n_neighbor;
    return out;
}

BirthdayOutcome count_collisions(CubeDim dim, std::vector<Vertex> draws) {
    const auto d = static_cast<std::size_t>(dim.value());
    if (draws.size() <= d * (d - 1)) return count_collisions_pairwise(draws);
    return count_collisions_sorted(dim, std::move(draws));
}

double theta(const WeightMeasure& m, std::uint64_t n) {
    if (n < 2) throw DomainError("theta needs n >= 2");
    const auto nd = static_cast<double>(n);
    return nd * (nd - 1.0) / 2.0 * m.sum_squares() / (m.total() * m.total());
}

SteinDiagnostics stein_diagnostics(const WeightMeasure& m, std::uint64_t n) {
    const int d = m.dim().value();
    if (d > kSteinMaxDim) throw DimensionError("stein_diagnostics needs d <= 20");
    if (n < 2) throw DomainError("stein_diagnostics needs n >= 2");
    CompensatedSum pairs;
    const auto half = static_cast<Rank>(m.dim().side_size());
    for (Rank r = 0; r < half; ++r) {
        const Vertex u = vertex_at(m.side(), r);
        double partial = 0.0;
        for (int a = 0; a < d; ++a)
            for (int b = a + 1; b < d; ++b) {
                const Vertex v = u ^ (Vertex{1} << a) ^ (Vertex{1} << b);
                if (v > u) partial += m.weight(parity_rank(v));
            }
        pairs.add(m.weight(r) * partial);
    }
    const auto nd = static_cast<double>(n);
    const double phi = m.total();
    const double r2 = m.sum_squares() / (phi * phi);
    return {nd * nd * pairs.value() / (phi * phi), nd * nd * nd * m.sum_cubes() / (phi * phi * phi),
            nd * nd * nd * r2 * r2};
}

}  // namespace cubeperc
