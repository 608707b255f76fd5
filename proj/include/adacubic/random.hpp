#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace adacubic {

// mt19937_64 output is fixed by the standard; the helpers below avoid the
// implementation-defined std:: distributions so seeded streams are portable.
using Rng = std::mt19937_64;

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Uniform integer in [0, n). Rejection sampling, no modulo bias.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
  const std::uint64_t limit = (~std::uint64_t{0}) - ((~std::uint64_t{0}) % n);
  std::uint64_t v = rng();
  while (v >= limit) v = rng();
  return v % n;
}

/// Standard normal via Box-Muller (one value per call; the pair partner is discarded).
double standard_normal(Rng& rng);

/// `k` distinct indices from [0, n), in draw order (partial Fisher-Yates).
std::vector<std::size_t> sample_without_replacement(Rng& rng, std::size_t n, std::size_t k);

}  // namespace adacubic
