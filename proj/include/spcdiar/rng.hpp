#ifndef SPCDIAR_RNG_HPP
#define SPCDIAR_RNG_HPP

#include <bit>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

// Seeding and draw helpers on top of std::mt19937_64.
//
// The engine itself is fully specified by the standard; the distribution adaptors
// are not, so we draw uniforms and gaussians by hand. Results are then identical
// across standard library implementations, which the byte-identical rerun
// guarantee depends on.

namespace spcdiar::rng {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

inline std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    return splitmix64(a ^ (0x9e3779b97f4a7c15ull + (b << 6) + (b >> 2)));
}

inline std::uint64_t key(double v) {
    return std::bit_cast<std::uint64_t>(v);
}

// Uniform in [0, 1).
inline double uniform(std::mt19937_64& g) {
    return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& g, double lo, double hi) {
    return lo + (hi - lo) * uniform(g);
}

// Uniform integer in [lo, hi] inclusive.
inline std::int64_t uniform_int(std::mt19937_64& g, std::int64_t lo, std::int64_t hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::int64_t>(g() % span);
}

// Standard normal via Box-Muller.
inline double gaussian(std::mt19937_64& g) {
    double u1 = uniform(g);
    while (u1 <= 0.0) u1 = uniform(g);
    const double u2 = uniform(g);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

template <typename T>
void shuffle(std::mt19937_64& g, std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(uniform_int(g, 0, static_cast<std::int64_t>(i) - 1));
        std::swap(v[i - 1], v[j]);
    }
}

}  // namespace spcdiar::rng

#endif
