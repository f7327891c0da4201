#pragma once

#include <cstdint>
#include <random>

namespace pcaenc {

// std::uniform_int_distribution is implementation-defined, so bounded draws are
// done here on top of the fully specified mt19937_64 stream.
using Rng = std::mt19937_64;

/// Uniform integer in [0, n) by rejection sampling. `n` must be positive.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x = rng();
    while (x >= limit) x = rng();
    return x % n;
}

/// SplitMix64 finalizer, used to derive independent stream seeds.
inline std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace pcaenc
