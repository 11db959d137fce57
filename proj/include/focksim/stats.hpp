#pragma once
#include <cmath>
#include <cstdint>

namespace focksim {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double x) const { return x >= lo && x <= hi; }
};

/// Wilson score interval for a binomial proportion. z defaults to the
/// two-sided 95% quantile.
inline Interval wilson_interval(std::uint64_t successes, std::uint64_t n,
                                double z = 1.959963984540054) {
  if (n == 0) return {0.0, 1.0};
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(successes) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = (p + z2 / (2.0 * nn)) / denom;
  const double half =
      z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
  return {center - half, center + half};
}

}  // namespace focksim
