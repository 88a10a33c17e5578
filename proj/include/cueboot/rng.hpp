#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace cueboot {

// Deterministic sampling helpers. std::mt19937_64 is bit-exact across
// platforms, but std::uniform_int_distribution and std::shuffle are not, so
// the bounded draw and the shuffle are spelled out here.

/// Uniform draw in [0, bound) by rejection; bit-exact for a given engine state.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  if (bound <= 1) return 0;
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

/// Fisher-Yates shuffle with uniform_below draws.
template <typename T>
void deterministic_shuffle(std::vector<T>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(uniform_below(rng, i));
    std::swap(v[i - 1], v[j]);
  }
}

/// First k elements of a seeded shuffle (sampling without replacement).
template <typename T>
std::vector<T> sample_without_replacement(const std::vector<T>& pool, std::size_t k,
                                          std::mt19937_64& rng) {
  std::vector<T> v = pool;
  for (std::size_t i = 0; i < k && i + 1 < v.size(); ++i) {
    std::size_t j = i + static_cast<std::size_t>(uniform_below(rng, v.size() - i));
    std::swap(v[i], v[j]);
  }
  if (k < v.size()) v.resize(k);
  return v;
}

/// Mixes a seed with stream coordinates so that per-(k, resample) streams are
/// independent of iteration order.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
  // splitmix64 finalizer
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (a + 1) + 0xbf58476d1ce4e5b9ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace cueboot
