#pragma once

#include <cstdint>
#include <random>

namespace qcgauge {

/// mt19937_64 with a fixed bits-to-double mapping, so streams are identical
/// across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Stream for one (generation, trial) pair of a seeded run.
  static Rng derived(std::uint64_t seed, std::uint64_t generation, std::uint64_t trial = 0) {
    std::uint64_t s = seed;
    s ^= 0x9e3779b97f4a7c15ULL * (generation + 1);
    s ^= 0xbf58476d1ce4e5b9ULL * (trial + 1);
    return Rng(s);
  }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace qcgauge
