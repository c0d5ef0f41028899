#pragma once

// Random number generation used across the toolkit.
//
// Two generators are fixed by name so results are reproducible from any
// language:
//   * SplitMix64 (Steele, Lea, Flood 2014) for seeding, seed derivation and
//     the counter-based edge stream of a percolation instance;
//   * xoshiro256** (Blackman, Vigna 2018), seeded from SplitMix64, for the
//     sequential streams used by the samplers and Monte Carlo drivers.

#include <cmath>
#include <cstdint>
#include <limits>

namespace cubeperc {

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

/// SplitMix64 output finalizer (stateless bijection on 64-bit words).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Output number `index` (0-based) of the SplitMix64 stream whose state starts
/// at `key`. Random access makes the stream counter-based.
constexpr std::uint64_t splitmix64_at(std::uint64_t key, std::uint64_t index) noexcept {
    return mix64(key + (index + 1) * kGoldenGamma);
}

class SplitMix64 {
  public:
    using result_type = std::uint64_t;

    explicit constexpr SplitMix64(std::uint64_t state) noexcept : state_(state) {}

    constexpr result_type operator()() noexcept {
        state_ += kGoldenGamma;
        return mix64(state_);
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  private:
    std::uint64_t state_;
};

/// Per-task seed: mix64(mix64(mix64(master) ^ instance) ^ trial), with the
/// instance and trial indices offset by distinct odd constants so that
/// (0, 0) does not collapse onto the master seed.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t instance,
                                    std::uint64_t trial = 0) noexcept {
    std::uint64_t h = mix64(master);
    h = mix64(h ^ (instance * kGoldenGamma + 0x632BE59BD9B4E019ULL));
    h = mix64(h ^ (trial * 0xD1B54A32D192ED03ULL + 0x8CB92BA72F3D8DD7ULL));
    return h;
}

class Xoshiro256ss {
  public:
    using result_type = std::uint64_t;

    explicit Xoshiro256ss(std::uint64_t seed) noexcept {
        SplitMix64 sm(seed);
        for (auto& word : s_) word = sm();
    }

    result_type operator()() noexcept {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
        return (x << k) | (x >> (64 - k));
    }
    std::uint64_t s_[4];
};

/// Uniform double in [0, 1) built from the top 53 bits of one word.
inline double to_unit(std::uint64_t word) noexcept {
    return static_cast<double>(word >> 11) * 0x1.0p-53;
}

template <class Rng>
double uniform01(Rng& rng) {
    return to_unit(rng());
}

/// Uniform integer in [0, bound) by Lemire's multiply-shift (bias < bound / 2^64).
__extension__ typedef unsigned __int128 uint128_t;

template <class Rng>
std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
    return static_cast<std::uint64_t>((static_cast<uint128_t>(rng()) * bound) >> 64);
}

/// Number of failures before the first success of a Bernoulli(q) sequence.
/// Returns max() when q == 0.
template <class Rng>
std::uint64_t geometric_skip(Rng& rng, double q) {
    if (q >= 1.0) return 0;
    if (q <= 0.0) return std::numeric_limits<std::uint64_t>::max();
    // 1 - u lies in (0, 1], so the log is finite.
    const double u = 1.0 - uniform01(rng);
    const double k = std::floor(std::log(u) / std::log1p(-q));
    if (!(k < 1.8e19)) return std::numeric_limits<std::uint64_t>::max();
    return static_cast<std::uint64_t>(k);
}

}  // namespace cubeperc
