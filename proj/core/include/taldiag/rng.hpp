#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <vector>

namespace taldiag {

// mt19937_64 with hand-rolled value mappings: std::uniform_*_distribution is
// implementation-defined, which would break byte-identical output across
// standard libraries.

inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + uniform01(rng) * (hi - lo);
}

/// Uniform integer in [0, n), n >= 1. Rejection sampling keeps the draw
/// unbiased and seed-deterministic.
inline std::uint64_t uniform_index(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t v = rng();
  while (v >= limit) v = rng();
  return v % n;
}

template <typename T>
void shuffle_deterministic(std::vector<T>& values, std::mt19937_64& rng) {
  for (std::size_t i = values.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(uniform_index(rng, i));
    std::swap(values[i - 1], values[j]);
  }
}

/// Index drawn from unnormalized non-negative weights.
std::size_t weighted_index(std::mt19937_64& rng, const std::vector<double>& weights);

}  // namespace taldiag
