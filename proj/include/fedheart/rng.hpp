#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace fedheart {

// All randomness in the project flows through mt19937_64 seeded by mix_seed and
// drawn via bounded_draw/shuffle below. std::uniform_int_distribution and
// std::shuffle are implementation-defined, so they are avoided everywhere
// results must be bit-reproducible across standard libraries.

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Derives an independent stream seed from a master seed plus stream labels,
// e.g. mix_seed({master, round, client_id}).
inline std::uint64_t mix_seed(std::initializer_list<std::uint64_t> parts) {
    std::uint64_t h = 0x2545F4914F6CDD1DULL;
    for (std::uint64_t p : parts) h = splitmix64(h ^ splitmix64(p));
    return h;
}

// Uniform draw in [0, n), rejection sampling so the result only depends on the
// engine's specified output sequence.
inline std::uint64_t bounded_draw(std::mt19937_64& g, std::uint64_t n) {
    const std::uint64_t threshold = (0ULL - n) % n;  // 2^64 mod n
    for (;;) {
        std::uint64_t r = g();
        if (r >= threshold) return r % n;
    }
}

// Fisher-Yates with the deterministic bounded draw.
template <typename T>
void deterministic_shuffle(std::vector<T>& v, std::mt19937_64& g) {
    for (std::size_t i = v.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(bounded_draw(g, i));
        std::swap(v[i - 1], v[j]);
    }
}

// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(std::mt19937_64& g) {
    return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

}  // namespace fedheart
