#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <string_view>

// Seed derivation and sampling helpers. Everything downstream of a scenario
// seed goes through these so that runs are reproducible across platforms:
// mt19937_64 output is pinned by the standard, and the Gaussian sampler is a
// hand-written Box-Muller (std::normal_distribution is implementation-defined).
namespace vemo::rng {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Child seed for a named role, e.g. derive(seed, "noise", receiver_id, epoch).
inline std::uint64_t derive(std::uint64_t seed, std::string_view tag,
                            std::uint64_t a = 0, std::uint64_t b = 0) {
    std::uint64_t h = splitmix64(seed ^ fnv1a(tag));
    h = splitmix64(h ^ a);
    h = splitmix64(h ^ b);
    return h;
}

inline std::uint64_t derive(std::uint64_t seed, std::string_view tag,
                            std::string_view name, std::uint64_t b = 0) {
    return derive(seed, tag, fnv1a(name), b);
}

inline std::mt19937_64 engine(std::uint64_t seed) {
    return std::mt19937_64(seed);
}

// Uniform in [0, 1) with 53 random bits.
inline double uniform01(std::mt19937_64& g) {
    return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

// Circularly-symmetric complex Gaussian with E[|z|^2] = variance.
inline std::complex<double> cgaussian(std::mt19937_64& g, double variance) {
    const double u1 = 1.0 - uniform01(g); // (0, 1]
    const double u2 = uniform01(g);
    const double r = std::sqrt(-variance * std::log(u1));
    const double th = 2.0 * M_PI * u2;
    return {r * std::cos(th), r * std::sin(th)};
}

} // namespace vemo::rng
