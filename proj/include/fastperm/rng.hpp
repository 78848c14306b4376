#pragma once

#include <cstdint>
#include <random>

// Deterministic random streams. All stochastic code in the library draws from
// a RandomEngine seeded through derive_seed so that results are reproducible
// for a given master seed regardless of scheduling: each independent unit of
// work (replicate, feature, method) gets its own stream keyed by its index.

namespace fastperm {

using RandomEngine = std::mt19937_64;

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}
}  // namespace detail

inline std::uint64_t derive_seed(std::uint64_t seed) { return detail::splitmix64(seed); }

template <typename... Rest>
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t first, Rest... rest) {
    return derive_seed(detail::splitmix64(seed ^ detail::splitmix64(first)), rest...);
}

inline RandomEngine make_engine(std::uint64_t seed) { return RandomEngine(detail::splitmix64(seed)); }

// Uniform integer in [0, n), unbiased via rejection. Avoids
// std::uniform_int_distribution so draws do not depend on the standard
// library implementation.
inline std::uint64_t uniform_below(RandomEngine& rng, std::uint64_t n) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t v;
    do {
        v = rng();
    } while (v >= limit);
    return v % n;
}

// Uniform double in [0, 1) with 53 random bits.
inline double uniform_unit(RandomEngine& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace fastperm
