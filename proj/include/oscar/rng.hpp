#pragma once

#include <cstdint>
#include <random>

namespace oscar {

using Rng = std::mt19937_64;

// Independent sub-streams derived from one trial seed. Changing how one
// stream is consumed never perturbs another.
enum class Stream : std::uint64_t {
  kTopology = 1,
  kCapacity = 2,
  kWorkload = 3,
  kSelection = 4,
  kMonteCarlo = 5,
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, Stream stream,
                                 std::uint64_t index = 0) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ static_cast<std::uint64_t>(stream));
  return splitmix64(h ^ index);
}

inline Rng make_rng(std::uint64_t seed, Stream stream, std::uint64_t index = 0) {
  return Rng(derive_seed(seed, stream, index));
}

}  // namespace oscar
