#pragma once

#include <cstdint>
#include <random>

namespace topobohm {

/// Engine used for every seeded draw. mt19937_64 is fully specified by the
/// standard, and the conversions below avoid the implementation-defined
/// distributions, so draws are identical across standard libraries.
using Rng = std::mt19937_64;

/// Uniform on [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Uniform integer in [0, n), unbiased (rejection sampling).
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

/// Standard normal via Box–Muller (one value per call, the second is dropped).
double standard_normal(Rng& rng);

/// Exponential with the given rate.
double exponential(Rng& rng, double rate);

}  // namespace topobohm
