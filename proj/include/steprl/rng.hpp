#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace steprl {

// Mixes a base seed with up to three stream identifiers into a fresh 64-bit
// seed. Every component of a run (allocation, each rollout slot, each
// augmentation group) draws from its own derived stream, so results do not
// depend on the order in which independent pieces of work execute.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a,
                          std::uint64_t b = 0, std::uint64_t c = 0);

// Deterministic random source. All distributions are built on the raw
// 64-bit engine output, so sequences are reproducible across platforms and
// standard-library versions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53-bit resolution.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  bool bernoulli(double probability);

  // Uniform index in [0, n); n must be positive.
  std::size_t uniform_index(std::size_t n);

  // Index drawn with probability proportional to weights[i]. Weights must be
  // non-negative, finite, and not all zero.
  std::size_t categorical(std::span<const double> weights);

  // Child generator seeded from the next engine output mixed with the given
  // stream identifiers. Consumes one draw from this generator.
  Rng fork(std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0) {
    return Rng(derive_seed(next_u64(), a, b, c));
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace steprl
