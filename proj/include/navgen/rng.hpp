#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace navgen {

// All randomness goes through mt19937_64 plus the helpers below, never through
// std::uniform_*_distribution, whose output is implementation-defined. This keeps
// seeded runs byte-identical across standard libraries.
using Rng = std::mt19937_64;

inline double uniform_double(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Unbiased integer in [0, n).
inline std::uint64_t uniform_int(Rng& rng, std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v = rng();
    while (v >= limit) v = rng();
    return v % n;
}

template <typename T>
void shuffle(std::vector<T>& items, Rng& rng) {
    for (std::size_t i = items.size(); i > 1; --i) {
        std::swap(items[i - 1], items[uniform_int(rng, i)]);
    }
}

inline std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h = 1469598103934665603ull) {
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::uint64_t fnv1a64_u64(std::uint64_t v, std::uint64_t h) {
    for (int i = 0; i < 8; ++i) {
        h ^= (v >> (8 * i)) & 0xff;
        h *= 1099511628211ull;
    }
    return h;
}

// Deterministic child seed for a named stream.
inline std::uint64_t derive_seed(std::uint64_t base, std::string_view stream, std::uint64_t index = 0) {
    std::uint64_t h = fnv1a64(stream);
    h = fnv1a64_u64(base, h);
    h = fnv1a64_u64(index, h);
    return h;
}

}  // namespace navgen
