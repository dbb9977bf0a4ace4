#pragma once

#include <cstdint>
#include <random>

namespace parid {

using Rng = std::mt19937_64;

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Rng &rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// SplitMix64 finalizer; a bijection on 64-bit words.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed of replica `index` under `master`: the index-th output of the SplitMix64
/// stream started at `master`. Distinct indices below 2^64 give distinct seeds.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(master + index * 0x9e3779b97f4a7c15ULL);
}

} // namespace parid
