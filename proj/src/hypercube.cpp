#include "cubeperc/hypercube.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "cubeperc/rng.hpp"

namespace cubeperc {

namespace {

std::uint64_t words_for(std::uint64_t bits) { return (bits + 63) / 64; }

std::uint64_t double_bits(double x) {
    std::uint64_t out;
    std::memcpy(&out, &x, sizeof out);
    return out;
}

double bits_double(std::uint64_t b) {
    double out;
    std::memcpy(&out, &b, sizeof out);
    return out;
}

std::string hex64(std::uint64_t w) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i, w >>= 4) s[static_cast<std::size_t>(i)] = digits[w & 15];
    return s;
}

}  // namespace

const char* to_string(Parity p) noexcept { return p == Parity::Even ? "even" : "odd"; }

CubeDim::CubeDim(int d) : d_(d) {
    if (d < kMin || d > kMax)
        throw DimensionError("dimension d=" + std::to_string(d) + " outside [2, 30]");
}

void CubeDim::check_vertex(Vertex v) const {
    if (!contains(v))
        throw VertexError("vertex " + std::to_string(v) + " outside Q_" + std::to_string(d_));
}

// --- ParitySet -------------------------------------------------------------

ParitySet::ParitySet(CubeDim dim, Parity parity)
    : dim_(dim), parity_(parity), words_(words_for(dim.side_size()), 0) {}

ParitySet::ParitySet(CubeDim dim, Parity parity, std::span<const Vertex> members)
    : ParitySet(dim, parity) {
    for (Vertex v : members) insert(v);
}

ParitySet ParitySet::from_rank_mask(CubeDim dim, Parity parity, std::uint64_t mask) {
    if (dim.side_size() > 64) throw DimensionError("rank masks need d <= 7");
    ParitySet s(dim, parity);
    if (dim.side_size() < 64) mask &= (std::uint64_t{1} << dim.side_size()) - 1;
    s.words_[0] = mask;
    return s;
}

bool ParitySet::contains(Vertex v) const noexcept {
    return dim_.contains(v) && parity_of(v) == parity_ && contains_rank(parity_rank(v));
}

void ParitySet::insert(Vertex v) {
    dim_.check_vertex(v);
    if (parity_of(v) != parity_)
        throw VertexError("vertex " + std::to_string(v) + " is not " + to_string(parity_));
    insert_rank(parity_rank(v));
}

void ParitySet::erase(Vertex v) {
    dim_.check_vertex(v);
    if (parity_of(v) != parity_) return;
    const Rank r = parity_rank(v);
    words_[r >> 6] &= ~(std::uint64_t{1} << (r & 63));
}

std::uint64_t ParitySet::size() const noexcept {
    std::uint64_t n = 0;
    for (auto w : words_) n += static_cast<std::uint64_t>(std::popcount(w));
    return n;
}

std::vector<Vertex> ParitySet::members() const {
    std::vector<Vertex> out;
    for (std::size_t wi = 0; wi < words_.size(); ++wi) {
        for (std::uint64_t w = words_[wi]; w; w &= w - 1) {
            const auto r = static_cast<Rank>(wi * 64 + static_cast<std::size_t>(std::countr_zero(w)));
            out.push_back(vertex_at(parity_, r));
        }
    }
    return out;
}

std::uint64_t ParitySet::rank_mask() const {
    if (words_.size() != 1) throw DimensionError("rank masks need d <= 7");
    return words_[0];
}

// --- PercolationInstance ---------------------------------------------------

PercolationInstance::PercolationInstance(CubeDim dim, double p, std::uint64_t seed,
                                         std::vector<std::uint64_t> edges)
    : dim_(dim), p_(p), seed_(seed), edges_(std::move(edges)) {
    if (edges_.size() != words_for(dim_.edge_count()))
        throw DomainError("edge array has " + std::to_string(edges_.size()) + " words, expected " +
                          std::to_string(words_for(dim_.edge_count())));
    const auto tail = dim_.edge_count() & 63;
    if (tail != 0) edges_.back() &= (std::uint64_t{1} << tail) - 1;
}

bool PercolationInstance::edge_open(Vertex v, int coord) const noexcept {
    const Vertex even = parity_of(v) == Parity::Even ? v : (v ^ (Vertex{1} << coord));
    return edge_open(static_cast<std::uint64_t>(parity_rank(even)) * static_cast<std::uint64_t>(d()) +
                     static_cast<std::uint64_t>(coord));
}

std::uint32_t PercolationInstance::even_edge_field(Rank even_rank) const noexcept {
    const auto d = static_cast<unsigned>(dim_.value());
    const std::uint64_t pos = static_cast<std::uint64_t>(even_rank) * d;
    const std::uint64_t wi = pos >> 6;
    const unsigned off = static_cast<unsigned>(pos & 63);
    std::uint64_t val = edges_[wi] >> off;
    if (off + d > 64) val |= edges_[wi + 1] << (64 - off);
    return static_cast<std::uint32_t>(val & ((std::uint64_t{1} << d) - 1));
}

std::uint32_t PercolationInstance::open_coords(Vertex v) const noexcept {
    if (parity_of(v) == Parity::Even) return even_edge_field(parity_rank(v));
    std::uint32_t out = 0;
    for (int i = 0; i < d(); ++i) {
        const Vertex u = v ^ (Vertex{1} << i);
        if ((even_edge_field(parity_rank(u)) >> i) & 1u) out |= std::uint32_t{1} << i;
    }
    return out;
}

std::uint64_t PercolationInstance::open_edge_count() const noexcept {
    std::uint64_t n = 0;
    for (auto w : edges_) n += static_cast<std::uint64_t>(std::popcount(w));
    return n;
}

std::vector<std::uint8_t> PercolationInstance::side_degrees(Parity side) const {
    const auto n = static_cast<Rank>(dim_.side_size());
    std::vector<std::uint8_t> deg(n, 0);
    if (side == Parity::Even) {
        for (Rank r = 0; r < n; ++r) deg[r] = static_cast<std::uint8_t>(std::popcount(even_edge_field(r)));
        return deg;
    }
    for (Rank r = 0; r < n; ++r) {
        const Vertex v = vertex_at(Parity::Even, r);
        for (std::uint32_t f = even_edge_field(r); f; f &= f - 1) {
            const Vertex u = v ^ (Vertex{1} << std::countr_zero(f));
            ++deg[parity_rank(u)];
        }
    }
    return deg;
}

bool IndependentSet::is_valid(const PercolationInstance& inst) const {
    if (!(even.dim() == inst.dim()) || !(odd.dim() == inst.dim())) return false;
    for (Vertex v : even.members()) {
        for (std::uint32_t f = inst.open_coords(v); f; f &= f - 1) {
            if (odd.contains(v ^ (Vertex{1} << std::countr_zero(f)))) return false;
        }
    }
    return true;
}

// --- operations -------------------------------------------------------------

PercolationInstance build_percolation(int d, double p, std::uint64_t seed) {
    const CubeDim dim(d);
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("edge probability must lie in [0, 1]");
    const std::uint64_t m = dim.edge_count();
    std::vector<std::uint64_t> words(words_for(m), 0);
    // p * 2^53 is exact; comparing the top 53 bits against it is u < p.
    const auto threshold = static_cast<std::uint64_t>(std::ldexp(p, 53));
    const std::uint64_t key = mix64(seed);
    for (std::uint64_t wi = 0; wi < words.size(); ++wi) {
        const std::uint64_t base = wi * 64;
        const std::uint64_t count = std::min<std::uint64_t>(64, m - base);
        std::uint64_t w = 0;
        for (std::uint64_t b = 0; b < count; ++b) {
            const std::uint64_t x = splitmix64_at(key, base + b) >> 11;
            w |= static_cast<std::uint64_t>(x < threshold) << b;
        }
        words[wi] = w;
    }
    return PercolationInstance(dim, p, seed, std::move(words));
}

int open_degree(const PercolationInstance& inst, Vertex v) {
    inst.dim().check_vertex(v);
    return std::popcount(inst.open_coords(v));
}

ParitySet open_neighborhood(const PercolationInstance& inst, const ParitySet& s) {
    if (!(s.dim() == inst.dim())) throw DimensionError("set and instance dimensions differ");
    ParitySet out(inst.dim(), opposite(s.parity()));
    for (Vertex v : s.members()) {
        for (std::uint32_t f = inst.open_coords(v); f; f &= f - 1)
            out.insert_rank(parity_rank(v ^ (Vertex{1} << std::countr_zero(f))));
    }
    return out;
}

std::uint64_t open_neighborhood_size(const PercolationInstance& inst, const ParitySet& s) {
    return open_neighborhood(inst, s).size();
}

ParitySet full_neighborhood(CubeDim dim, const ParitySet& s) {
    ParitySet out(dim, opposite(s.parity()));
    for (Vertex v : s.members()) {
        for (int i = 0; i < dim.value(); ++i) out.insert_rank(parity_rank(v ^ (Vertex{1} << i)));
    }
    return out;
}

std::vector<ParitySet> two_linked_components(CubeDim dim, const ParitySet& s) {
    const int d = dim.value();
    ParitySet unvisited = s;
    std::vector<ParitySet> blocks;
    std::vector<Vertex> stack;
    for (Vertex root : s.members()) {
        if (!unvisited.contains(root)) continue;
        ParitySet block(dim, s.parity());
        unvisited.erase(root);
        stack.push_back(root);
        while (!stack.empty()) {
            const Vertex v = stack.back();
            stack.pop_back();
            block.insert(v);
            for (int i = 0; i < d; ++i) {
                for (int j = i + 1; j < d; ++j) {
                    const Vertex w = v ^ (Vertex{1} << i) ^ (Vertex{1} << j);
                    if (unvisited.contains(w)) {
                        unvisited.erase(w);
                        stack.push_back(w);
                    }
                }
            }
        }
        blocks.push_back(std::move(block));
    }
    return blocks;
}

ParitySet closure(CubeDim dim, const ParitySet& s) {
    const int d = dim.value();
    const ParitySet nbhd = full_neighborhood(dim, s);
    ParitySet out(dim, s.parity());
    auto covered = [&](Vertex v) {
        for (int i = 0; i < d; ++i)
            if (!nbhd.contains(v ^ (Vertex{1} << i))) return false;
        return true;
    };
    // Any qualifying vertex shares a neighbor with S, so it is in S or a 2-neighbor of S.
    for (Vertex v : s.members()) {
        out.insert(v);
        for (int i = 0; i < d; ++i) {
            for (int j = i + 1; j < d; ++j) {
                const Vertex w = v ^ (Vertex{1} << i) ^ (Vertex{1} << j);
                if (!out.contains(w) && covered(w)) out.insert(w);
            }
        }
    }
    return out;
}

std::uint64_t good_size_bound(CubeDim dim) noexcept {
    const auto d = static_cast<std::uint64_t>(dim.value());
    return dim.vertex_count() / (d * d);
}

bool is_good(CubeDim dim, const ParitySet& s) {
    const auto members = s.members();
    if (members.size() > good_size_bound(dim)) return false;
    for (std::size_t a = 0; a < members.size(); ++a)
        for (std::size_t b = a + 1; b < members.size(); ++b)
            if (two_neighbors(members[a], members[b])) return false;
    return true;
}

// --- serialization ----------------------------------------------------------

std::string instance_header_json(const PercolationInstance& inst) {
    nlohmann::ordered_json h;
    h["format"] = "cubeperc-instance";
    h["version"] = kInstanceFormatVersion;
    h["d"] = inst.d();
    h["p"] = inst.p();
    h["p_bits"] = "0x" + hex64(double_bits(inst.p()));
    h["seed"] = inst.seed();
    h["edge_count"] = inst.dim().edge_count();
    h["open_edges"] = inst.open_edge_count();
    h["word_count"] = inst.edge_words().size();
    h["encoding"] = "hex64-le";
    return h.dump();
}

void write_instance(std::ostream& out, const PercolationInstance& inst) {
    out << instance_header_json(inst) << '\n';
    for (auto w : inst.edge_words()) out << hex64(w) << '\n';
}

PercolationInstance read_instance(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw DomainError("instance stream is empty");
    const auto h = nlohmann::json::parse(line);
    if (h.value("format", "") != "cubeperc-instance")
        throw DomainError("not a cubeperc instance header");
    if (h.at("version").get<int>() != kInstanceFormatVersion)
        throw DomainError("unsupported instance format version " + h.at("version").dump());
    const CubeDim dim(h.at("d").get<int>());
    const auto pbits = std::stoull(h.at("p_bits").get<std::string>(), nullptr, 16);
    const double p = bits_double(pbits);
    const auto seed = h.at("seed").get<std::uint64_t>();
    const auto nwords = h.at("word_count").get<std::uint64_t>();
    std::vector<std::uint64_t> words;
    words.reserve(nwords);
    while (words.size() < nwords && std::getline(in, line)) {
        if (line.empty()) continue;
        if (line.size() != 16) throw DomainError("malformed edge word '" + line + "'");
        words.push_back(std::stoull(line, nullptr, 16));
    }
    if (words.size() != nwords) throw DomainError("instance stream truncated");
    return PercolationInstance(dim, p, seed, std::move(words));
}

}  // namespace cubeperc
