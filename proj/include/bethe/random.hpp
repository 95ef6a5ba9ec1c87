#pragma once

// Portable seeded randomness. std::mt19937_64 has a fully specified output
// sequence; the standard distributions do not, so the draws below are done by hand.

#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

namespace bethe {

using Rng = std::mt19937_64;

/// Uniform integer in [0, n) by rejection. n must be positive.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t n) {
  const std::uint64_t threshold = (std::uint64_t{0} - n) % n;  // 2^64 mod n
  std::uint64_t r = rng();
  while (r < threshold) r = rng();
  return r % n;
}

/// Uniform double in [0, 1).
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline double uniform_real(Rng& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

inline std::vector<int> random_permutation(Rng& rng, int n) {
  std::vector<int> p(static_cast<std::size_t>(n));
  std::iota(p.begin(), p.end(), 0);
  for (int i = n - 1; i > 0; --i) {
    const auto j = static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(i) + 1));
    std::swap(p[static_cast<std::size_t>(i)], p[static_cast<std::size_t>(j)]);
  }
  return p;
}

}  // namespace bethe
