// SPDX-License-Identifier: Apache-2.0
#ifndef FUNNELCAST_RNG_HPP
#define FUNNELCAST_RNG_HPP

#include <cmath>
#include <cstdint>

namespace funnelcast {

/// SplitMix64 finalizer (Steele/Lea/Flood 2014). Full 64-bit avalanche,
/// bijective, identical output on every platform.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// A counter-mode random stream: draw k of stream `key` is
/// mix64(key + k * gamma). Streams derived from distinct keys are
/// independent for practical purposes, support O(1) jump-ahead, and are
/// reproducible bit-for-bit across platforms and compilers. Substreams
/// let a simulation give every (user, purpose) pair its own lane so that
/// changing one behavioural parameter never shifts the draws of another.
class RandomStream {
 public:
  RandomStream() : key_(0) {}
  explicit RandomStream(std::uint64_t key) : key_(key) {}

  /// Child stream for a tagged purpose; deterministic in (key, tag).
  RandomStream substream(std::uint64_t tag) const {
    return RandomStream(mix64(key_ ^ mix64(tag + 0x632be59bd9b4e019ULL)));
  }

  std::uint64_t next_u64() { return mix64(key_ + (++counter_) * kGamma); }

  /// Uniform double in [0, 1) with 53 random mantissa bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform01() < p; }

  /// Uniform integer in [0, n) without modulo bias (Lemire 128-bit trick).
  std::uint64_t uniform_below(std::uint64_t n) {
    if (n == 0) return 0;
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  /// Uniform integer in [lo, hi] inclusive.
  std::int64_t uniform_range(std::int64_t lo, std::int64_t hi) {
    if (hi <= lo) return lo;
    return lo + static_cast<std::int64_t>(
                    uniform_below(static_cast<std::uint64_t>(hi - lo) + 1));
  }

  /// Poisson sample by Knuth's product method; fine for the small means
  /// used here (message rates, contact counts).
  int poisson(double mean) {
    if (mean <= 0.0) return 0;
    const double limit = std::exp(-mean);
    int k = 0;
    double p = 1.0;
    do {
      ++k;
      p *= uniform01();
    } while (p > limit);
    return k - 1;
  }

 private:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace funnelcast

#endif  // FUNNELCAST_RNG_HPP
