#pragma once
// Counter-based random numbers: every sample is a pure function of
// (seed, stream, index), so parallel evaluation order cannot change results.

#include <cmath>
#include <cstdint>
#include <numbers>

namespace fdg {

constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// uniform in (0, 1]
inline double counter_uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    std::uint64_t h = mix64(mix64(seed ^ 0xD1B54A32D192ED03ULL) ^ mix64(stream) ^ index * 0x9E3779B97F4A7C15ULL);
    return (static_cast<double>(h >> 11) + 1.0) / 9007199254740992.0;
}

// standard normal via Box-Muller on two decorrelated counters
inline double counter_normal(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    double u1 = counter_uniform(seed, stream, 2 * index);
    double u2 = counter_uniform(seed, stream, 2 * index + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace fdg
