#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace lhi::rng {

// splitmix64 finalizer; the standard way to turn correlated keys into
// well-distributed seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t mix(std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0,
                         std::uint64_t d = 0) {
    std::uint64_t h = splitmix64(a);
    h = splitmix64(h ^ b);
    h = splitmix64(h ^ c);
    h = splitmix64(h ^ d);
    return h;
}

// Deterministic substream keyed by (seed, indices). Substreams with distinct
// keys are independent for all practical purposes, which makes parallel work
// reproducible regardless of scheduling.
inline std::mt19937_64 substream(std::uint64_t seed, std::uint64_t a = 0, std::uint64_t b = 0,
                                 std::uint64_t c = 0) {
    return std::mt19937_64(mix(seed, a, b, c));
}

// Uniform in [0, 1) with 53 random bits. Hand-rolled instead of
// std::uniform_real_distribution so streams are identical across standard
// library implementations.
inline double uniform01(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

// Uniform in (0, 1]; safe as a log() argument.
inline double uniform01_open(std::mt19937_64& gen) {
    return (static_cast<double>(gen() >> 11) + 1.0) * 0x1.0p-53;
}

// Standard normal via Box-Muller. Always consumes exactly two engine draws,
// so call sequences stay aligned no matter how results are used.
inline double gauss(std::mt19937_64& gen) {
    double u1 = uniform01_open(gen);
    double u2 = uniform01(gen);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

}  // namespace lhi::rng
