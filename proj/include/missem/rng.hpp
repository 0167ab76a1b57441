#pragma once

#include <cstdint>
#include <vector>

namespace missem {

// Counter-based uniform stream: variate i of stream `seed` is a pure function
// of (seed, i). Chains built from it are reproducible byte-for-byte and the
// stream can be split per chain without shared state.
inline std::uint64_t splitmix64_at(std::uint64_t seed, std::uint64_t i) {
  std::uint64_t z = seed + (i + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Uniform double in [0, 1) with 53 random bits.
inline double uniform01_at(std::uint64_t seed, std::uint64_t i) {
  return static_cast<double>(splitmix64_at(seed, i) >> 11) * 0x1.0p-53;
}

// Inverse-CDF pick over unnormalized weights laid out in canonical support
// order. `total` is the weight sum and must be positive. The final bucket
// absorbs accumulated rounding at the top end.
inline std::size_t inverse_cdf_pick(const std::vector<double>& weights, double total, double u) {
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
    acc += weights[i];
    if (u * total < acc) return i;
  }
  return weights.empty() ? 0 : weights.size() - 1;
}

}  // namespace missem
