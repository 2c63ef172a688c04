#pragma once

#include <cstdint>
#include <random>

namespace recipe_rl {

/// Seeded generator for one run. The engine is std::mt19937_64, whose output
/// sequence is fixed by the standard; the mappings to [0, 1) and [0, n) are
/// done here rather than through <random> distributions so runs reproduce
/// bit-for-bit across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n), n >= 1. Rejects the low (2^64 mod n) raw
  /// values so every residue is equally likely.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;
    std::uint64_t x = next();
    while (x < threshold) x = next();
    return x % n;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace recipe_rl
