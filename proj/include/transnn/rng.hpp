#pragma once

#include <cstdint>
#include <random>

namespace transnn {

/// Seedable, splittable random stream.
///
/// Wraps std::mt19937_64 but derives uniform variates with explicit bit
/// manipulation instead of std::uniform_real_distribution, so the produced
/// sequence is identical across standard library implementations. child(i)
/// derives a statistically independent stream from (seed, i); bulk samplers
/// hand one child per trial so results do not depend on worker count or
/// scheduling.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : seed_(seed), engine_(mix(seed)) {}

  /// Independent derived stream; pure function of (this->seed(), index).
  RngStream child(std::uint64_t index) const {
    return RngStream(mix(seed_ ^ mix(index + 0x9E3779B97F4A7C15ull)));
  }

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53 significant bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Exact for p = 0 (never) and p = 1 (always).
  bool bernoulli(double p) { return uniform() < p; }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    // splitmix64 finalizer
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace transnn
