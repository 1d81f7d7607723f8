#pragma once

#include <cstdint>
#include <random>

namespace dynsindy {

/// Deterministic random source. One engine per logical stream; derived
/// streams (e.g. per trajectory) are seeded by mixing the base seed with the
/// stream index so results do not depend on evaluation order across streams.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  static Rng derived(std::uint64_t seed, std::uint64_t stream) {
    // splitmix64 finalizer on (seed, stream)
    std::uint64_t x = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return Rng(x);
  }

  double normal(double mean = 0.0, double std = 1.0) {
    return std::normal_distribution<double>(mean, std)(engine_);
  }

  double uniform(double lo = 0.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace dynsindy
