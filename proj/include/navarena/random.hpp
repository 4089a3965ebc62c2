#pragma once

#include <cstdint>
#include <random>

namespace navarena {

using Rng = std::mt19937_64;

/// Derives an independent child seed from a root seed and a stream label
/// (splitmix64 finalizer). Used to split one root seed across components.
constexpr std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream) {
  std::uint64_t z = root + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Stream labels for derive_seed.
enum class SeedStream : std::uint64_t {
  kMap = 1,
  kObstacles = 2,
  kPolicy = 3,
  kWorker = 4,
  kWorld = 5,
  kNetworkInit = 6,
  kEpisode = 7,
};

constexpr std::uint64_t derive_seed(std::uint64_t root, SeedStream stream) {
  return derive_seed(root, static_cast<std::uint64_t>(stream));
}

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int uniform_int(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

}  // namespace navarena
