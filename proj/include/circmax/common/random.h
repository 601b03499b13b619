#pragma once

#include <cstdint>
#include <random>

namespace circmax {

using Rng = std::mt19937_64;

/// splitmix64 finalizer; a bijection on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Seed of the independent stream for `(seed, stream)`. Streams for distinct
/// indices never share a seed for a fixed base seed.
constexpr std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) {
    return mix64(mix64(seed) + stream);
}

inline Rng make_stream(std::uint64_t seed, std::uint64_t stream) {
    return Rng(stream_seed(seed, stream));
}

inline double uniform(Rng& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

}  // namespace circmax
