#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace tourmon {

// Unbiased integer in [0, n) via rejection sampling. std::mt19937_64 output
// is pinned by the standard, so results are identical across platforms —
// unlike uniform_int_distribution, whose mapping is implementation-defined.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
  if (n == 0) return 0;
  std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t v;
  do {
    v = rng();
  } while (v >= limit);
  return v % n;
}

// Seed-determined permutation of [0, n) by Fisher-Yates.
inline std::vector<std::size_t> permutation(std::size_t n,
                                            std::uint64_t seed) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  std::mt19937_64 rng(seed);
  for (std::size_t i = n; i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(uniform_below(rng, i));
    std::swap(idx[i - 1], idx[j]);
  }
  return idx;
}

}  // namespace tourmon
