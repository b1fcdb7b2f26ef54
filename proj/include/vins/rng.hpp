#pragma once

#include <cstdint>
#include <random>

namespace vins {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Independent stream derived from a master seed. Stream 0 is the
/// initialization stream; the trainer uses stream = epoch number.
inline Rng seeded_rng(std::uint64_t seed, std::uint64_t stream = 0) {
  return Rng(splitmix64(splitmix64(seed) ^ splitmix64(stream + 1)));
}

}  // namespace vins
