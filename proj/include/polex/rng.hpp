#ifndef POLEX_RNG_HPP
#define POLEX_RNG_HPP

#include <bit>
#include <cstdint>
#include <span>

namespace polex {

/// SplitMix64 finalizer. Used both as the stream generator's output function
/// and as the stable hash for deriving child stream seeds.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Order-dependent combine for building stream seeds from several values.
constexpr std::uint64_t hash_combine(std::uint64_t h, std::uint64_t v) {
    return mix64(h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2)));
}

inline std::uint64_t hash_double(double v) {
    return std::bit_cast<std::uint64_t>(v);
}

/// Deterministic random stream (SplitMix64). All distributions are
/// implemented here rather than via <random> so that draw sequences are
/// identical across compilers and platforms for a given seed. Streams are
/// cheap value types; derive independent streams by hashing distinct tags
/// into the seed.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1), 53-bit resolution.
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n), unbiased via rejection. n must be > 0.
    std::uint64_t next_below(std::uint64_t n);

    bool bernoulli(double p) { return next_unit() < p; }

    /// Exponential with the given mean (mean must be > 0).
    double exponential(double mean);

    /// Normal via Box-Muller (two uniforms per draw, no internal cache).
    double normal(double mean, double sd);

    /// Poisson count; Knuth multiplication in chunks so large means stay exact.
    std::uint64_t poisson(double lambda);

    /// Index drawn proportionally to non-negative weights (single uniform,
    /// CDF walk). Weights must not all be zero.
    std::size_t discrete(std::span<const double> weights);

private:
    std::uint64_t state_;
};

}  // namespace polex

#endif  // POLEX_RNG_HPP
