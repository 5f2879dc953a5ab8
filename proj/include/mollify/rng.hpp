#pragma once

#include <cstdint>
#include <random>

namespace mollify {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer. Bijective on 64-bit integers.
constexpr std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed of stream `index` under `master`:
///   derive_seed(m, i) = splitmix64(splitmix64(m) ^ splitmix64(i + 1)).
/// Trials draw from their own stream, so results do not depend on execution order.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(splitmix64(master) ^ splitmix64(index + 1));
}

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

}  // namespace mollify
