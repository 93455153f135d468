#pragma once

#include <cstdint>
#include <random>

namespace npca {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Deterministic random stream. Bounded ints and canonical doubles are
/// produced by hand so that identical seeds give identical sequences on any
/// platform; each stream tag forks an independent substream from one seed.
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream_tag) {
    std::uint64_t s = seed ^ (0x6a09e667f3bcc909ULL + stream_tag * 0x9e3779b97f4a7c15ULL);
    const std::uint64_t s0 = splitmix64(s);
    engine_.seed(s0);
  }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  bool bernoulli(double p) { return uniform01() < p; }

  /// Uniform integer in [0, bound), bound >= 1. Unbiased via rejection.
  std::uint32_t uniform_int(std::uint32_t bound) {
    if (bound <= 1) return 0;
    const std::uint64_t threshold = (~std::uint64_t{0} - bound + 1) % bound;
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return static_cast<std::uint32_t>(r % bound);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace npca
