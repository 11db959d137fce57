#pragma once
#include <cmath>
#include <cstdint>
#include <numbers>

namespace focksim {

/// SplitMix64 finalizer. Used as a keyed counter-mode PRF: output i of a
/// stream depends only on (key, i), never on call history.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;

/// Counter-based uniform random stream.
///
/// Streams for different (master seed, sweep point, trial) tuples are derived
/// through `derive`, so trials can run in any order or in parallel and still
/// see exactly the same numbers. All samplers consume a documented number of
/// uniforms; nothing draws from ambient state.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t key) : key_(key) {}

  static RandomStream derive(std::uint64_t master_seed, std::uint64_t point,
                             std::uint64_t trial) {
    std::uint64_t k = mix64(master_seed + kGoldenGamma);
    k = mix64(k ^ (point + kGoldenGamma));
    k = mix64(k ^ (trial + kGoldenGamma));
    return RandomStream(k);
  }

  std::uint64_t next_u64() {
    ++counter_;
    return mix64(key_ + counter_ * kGoldenGamma);
  }

  /// Uniform in [0, 1) with 53-bit resolution. One u64 draw.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Gaussian via the trigonometric Box-Muller transform. Always consumes
  /// exactly two uniforms, which keeps draw counts predictable.
  double normal(double mean, double stddev) {
    double u1 = uniform();
    double u2 = uniform();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    double r = std::sqrt(-2.0 * std::log(u1));
    return mean + stddev * r * std::cos(2.0 * std::numbers::pi * u2);
  }

  /// Poisson by CDF inversion on a single uniform; adequate for the small
  /// means used by weak coherent sources.
  int poisson(double mu) {
    double u = uniform();
    double p = std::exp(-mu);
    double cdf = p;
    int k = 0;
    while (u > cdf && k < 2000) {
      ++k;
      p *= mu / k;
      cdf += p;
    }
    return k;
  }

  std::uint64_t key() const { return key_; }

  /// Number of u64 outputs consumed so far (feeds pool lineage records).
  std::uint64_t draws() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace focksim
