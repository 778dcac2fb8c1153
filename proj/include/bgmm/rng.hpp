#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace bgmm {

// splitmix64-style finalizer; derives independent stream seeds from a
// (seed, index) pair without coordination between workers.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index);

// Seedable RNG with explicit draw algorithms so that a given seed produces
// the same stream in every component (chains, permutations, DGP draws).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // U[0,1); consumes exactly one engine step.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // N(0,1) by the polar method; the spare deviate is cached.
  double normal();

  // Unbiased draw from {0, ..., bound-1}.
  std::uint64_t below(std::uint64_t bound);

  // Fisher-Yates shuffle of {0, ..., n-1}.
  std::vector<int> permutation(int n);

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace bgmm
