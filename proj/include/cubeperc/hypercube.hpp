#pragma once

// Geometry of the hypercube Q_d and its bond percolation.
//
// Vertices are the integers [0, 2^d); the parity of v is popcount(v) mod 2.
// Within each parity class vertices are indexed by their rank in increasing
// numeric order, which is simply v >> 1 (each pair {2k, 2k+1} holds exactly
// one vertex of each parity).
//
// Edge (v, i) with v even joins v and v ^ (1 << i) and has id
// rank(v) * d + i. Edge bits are packed little-endian into 64-bit words.

#include <bit>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "cubeperc/errors.hpp"

namespace cubeperc {

using Vertex = std::uint32_t;
using Rank = std::uint32_t;

enum class Parity : std::uint8_t { Even = 0, Odd = 1 };

constexpr Parity opposite(Parity p) noexcept {
    return p == Parity::Even ? Parity::Odd : Parity::Even;
}

const char* to_string(Parity p) noexcept;

constexpr Parity parity_of(Vertex v) noexcept {
    return (std::popcount(v) & 1) ? Parity::Odd : Parity::Even;
}

constexpr Rank parity_rank(Vertex v) noexcept { return v >> 1; }

/// Vertex of the given parity with the given rank.
constexpr Vertex vertex_at(Parity side, Rank rank) noexcept {
    const Vertex base = rank << 1;
    const bool base_odd = (std::popcount(base) & 1) != 0;
    return base_odd == (side == Parity::Odd) ? base : (base | 1u);
}

class CubeDim {
  public:
    static constexpr int kMin = 2;
    static constexpr int kMax = 30;

    /// Throws DimensionError outside [2, 30].
    explicit CubeDim(int d);

    int value() const noexcept { return d_; }
    std::uint64_t vertex_count() const noexcept { return std::uint64_t{1} << d_; }
    /// Vertices per parity class, 2^(d-1).
    std::uint64_t side_size() const noexcept { return std::uint64_t{1} << (d_ - 1); }
    std::uint64_t edge_count() const noexcept { return side_size() * static_cast<std::uint64_t>(d_); }

    bool contains(Vertex v) const noexcept { return v < vertex_count(); }
    void check_vertex(Vertex v) const;

    friend bool operator==(CubeDim, CubeDim) = default;

  private:
    int d_;
};

/// Subset of one parity class, stored as a bitmask over parity ranks.
class ParitySet {
  public:
    ParitySet(CubeDim dim, Parity parity);
    /// Throws VertexError if a member is out of range or of the other parity.
    ParitySet(CubeDim dim, Parity parity, std::span<const Vertex> members);
    /// Low side_size() bits of `mask` select members by rank (side_size() <= 64).
    static ParitySet from_rank_mask(CubeDim dim, Parity parity, std::uint64_t mask);

    CubeDim dim() const noexcept { return dim_; }
    Parity parity() const noexcept { return parity_; }

    bool contains(Vertex v) const noexcept;
    bool contains_rank(Rank r) const noexcept { return (words_[r >> 6] >> (r & 63)) & 1u; }
    void insert(Vertex v);
    void erase(Vertex v);
    void insert_rank(Rank r) noexcept { words_[r >> 6] |= std::uint64_t{1} << (r & 63); }

    std::uint64_t size() const noexcept;
    bool empty() const noexcept { return size() == 0; }
    std::vector<Vertex> members() const;
    /// Rank mask for sides of at most 64 vertices (d <= 7).
    std::uint64_t rank_mask() const;

    std::span<const std::uint64_t> words() const noexcept { return words_; }
    std::span<std::uint64_t> words() noexcept { return words_; }

    friend bool operator==(const ParitySet&, const ParitySet&) = default;

  private:
    CubeDim dim_;
    Parity parity_;
    std::vector<std::uint64_t> words_;
};

class PercolationInstance {
  public:
    /// Rebuilds an instance from stored edge words (used by deserialization).
    PercolationInstance(CubeDim dim, double p, std::uint64_t seed, std::vector<std::uint64_t> edges);

    CubeDim dim() const noexcept { return dim_; }
    int d() const noexcept { return dim_.value(); }
    double p() const noexcept { return p_; }
    std::uint64_t seed() const noexcept { return seed_; }
    std::span<const std::uint64_t> edge_words() const noexcept { return edges_; }

    bool edge_open(std::uint64_t edge_id) const noexcept {
        return (edges_[edge_id >> 6] >> (edge_id & 63)) & 1u;
    }
    /// Edge between v and v ^ (1 << coord); v may have either parity.
    bool edge_open(Vertex v, int coord) const noexcept;

    /// The d edge bits of an even vertex, bit i = coordinate i.
    std::uint32_t even_edge_field(Rank even_rank) const noexcept;
    /// Open-edge bitmap of any vertex, bit i = coordinate i.
    std::uint32_t open_coords(Vertex v) const noexcept;

    std::uint64_t open_edge_count() const noexcept;

    /// Open degrees of every vertex on one side, in rank order.
    std::vector<std::uint8_t> side_degrees(Parity side) const;

    friend bool operator==(const PercolationInstance&, const PercolationInstance&) = default;

  private:
    CubeDim dim_;
    double p_;
    std::uint64_t seed_;
    std::vector<std::uint64_t> edges_;
};

/// Independent set given by its even and odd parts.
struct IndependentSet {
    ParitySet even;
    ParitySet odd;

    explicit IndependentSet(CubeDim dim) : even(dim, Parity::Even), odd(dim, Parity::Odd) {}
    IndependentSet(ParitySet e, ParitySet o) : even(std::move(e)), odd(std::move(o)) {}

    std::uint64_t size() const noexcept { return even.size() + odd.size(); }
    const ParitySet& side(Parity p) const noexcept { return p == Parity::Even ? even : odd; }
    ParitySet& side(Parity p) noexcept { return p == Parity::Even ? even : odd; }

    /// True iff no open edge joins a member of `even` to a member of `odd`.
    bool is_valid(const PercolationInstance& inst) const;
};

/// Edge bits are drawn from the SplitMix64 stream keyed by mix64(seed):
/// edge e is open iff (splitmix64_at(key, e) >> 11) < p * 2^53.
PercolationInstance build_percolation(int d, double p, std::uint64_t seed);

int open_degree(const PercolationInstance& inst, Vertex v);

/// Number of vertices joined to some member of S by an open edge.
std::uint64_t open_neighborhood_size(const PercolationInstance& inst, const ParitySet& s);
/// The open neighborhood itself (opposite parity).
ParitySet open_neighborhood(const PercolationInstance& inst, const ParitySet& s);

/// All Q_d neighbors of S (opposite parity).
ParitySet full_neighborhood(CubeDim dim, const ParitySet& s);

/// True iff u and v are at Hamming distance exactly 2.
constexpr bool two_neighbors(Vertex u, Vertex v) noexcept { return std::popcount(u ^ v) == 2; }

/// Maximal 2-linked blocks of S, ordered by smallest member.
std::vector<ParitySet> two_linked_components(CubeDim dim, const ParitySet& s);

/// {v of S's parity : N(v) is contained in N(S)}.
ParitySet closure(CubeDim dim, const ParitySet& s);

/// floor(2^d / d^2).
std::uint64_t good_size_bound(CubeDim dim) noexcept;

/// |S| <= floor(2^d / d^2) and no two members are 2-neighbors.
bool is_good(CubeDim dim, const ParitySet& s);

// Instance serialization. Format "cubeperc-instance" version 1: one JSON header
// line, then the edge words as 16-digit lowercase hex, one word per line.
inline constexpr int kInstanceFormatVersion = 1;
void write_instance(std::ostream& out, const PercolationInstance& inst);
PercolationInstance read_instance(std::istream& in);
std::string instance_header_json(const PercolationInstance& inst);

}  // namespace cubeperc
