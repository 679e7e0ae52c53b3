#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "rdars/constants.hpp"

// Deterministic randomness utilities. Every stochastic quantity in the
// toolkit flows through streams derived from explicit 64-bit seeds; the
// standard-library distributions are avoided because their algorithms are
// implementation-defined and would break byte-identical reproduction.

namespace rdars {

/// One step of the SplitMix64 sequence; `state` is advanced in place.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Independent engine for stream `stream_id` under master seed `seed`.
inline std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream_id) {
  std::uint64_t s = seed;
  std::uint64_t a = splitmix64(s);
  s ^= stream_id * 0xD2B74407B1CE6E93ull + 0x8BB84B93962EACC9ull;
  std::uint64_t b = splitmix64(s);
  std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  return std::mt19937_64(seq);
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform_double(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform double in [lo, hi).
inline double uniform_range(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform_double(rng);
}

/// Standard normal via Box-Muller; consumes exactly two uniforms per call.
inline double normal(std::mt19937_64& rng) {
  double u1 = uniform_double(rng);
  double u2 = uniform_double(rng);
  // Guard the log against u1 == 0.
  u1 = std::max(u1, 0x1.0p-60);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

/// Uniform integer in [0, bound).
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  return rng() % bound;
}

}  // namespace rdars
