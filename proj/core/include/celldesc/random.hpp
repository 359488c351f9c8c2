#ifndef CELLDESC_RANDOM_HPP_
#define CELLDESC_RANDOM_HPP_

#include <cstdint>
#include <random>
#include <vector>

namespace celldesc {

// std::uniform_int_distribution and std::shuffle are implementation-defined,
// so seeded outputs would differ across standard libraries. Sampling and
// splitting promise byte-identical results for a given seed; these helpers
// make the draw sequence part of the contract.

/// Uniform integer in [0, bound) by rejection sampling. bound must be > 0.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % bound;
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform_unit(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Fisher-Yates shuffle driven by uniform_below.
template <typename T>
void deterministic_shuffle(std::vector<T>& v, std::mt19937_64& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        using std::swap;
        swap(v[i - 1], v[uniform_below(rng, i)]);
    }
}

} // namespace celldesc

#endif // CELLDESC_RANDOM_HPP_
