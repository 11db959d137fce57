#pragma once
// Test-only oracles, kept independent of the implementation paths they
// certify.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <numeric>
#include <span>
#include <vector>

namespace focksim::testing {

/// Composite Simpson on a complex integrand with `panels` even panels.
template <class Fn>
std::complex<double> composite_simpson(const Fn& f, double a, double b,
                                       int panels) {
  const double h = (b - a) / panels;
  std::complex<double> acc = f(a) + f(b);
  for (int i = 1; i < panels; ++i) {
    acc += f(a + h * i) * (i % 2 ? 4.0 : 2.0);
  }
  return acc * (h / 3.0);
}

/// Defining integral of the spectral overlap, evaluated numerically:
///     integral dw phi1(w) phi2(w) exp(-i w dt)
/// over the intersection of the mu +- 12 sigma supports (the Gaussian
/// product is < 1e-31 outside it). The panel count resolves the carrier
/// oscillation exp(-i w dt) and is doubled until two refinements agree.
inline std::complex<double> spectral_overlap_quadrature(double mu1, double s1,
                                                        double tau1, double mu2,
                                                        double s2, double tau2,
                                                        double tol = 1e-10) {
  const double dt = tau2 - tau1;
  auto phi = [](double w, double mu, double s) {
    return std::exp(-(w - mu) * (w - mu) / (4.0 * s * s)) /
           (std::pow(2.0 * std::numbers::pi, 0.25) * std::sqrt(s));
  };
  auto integrand = [&](double w) {
    return phi(w, mu1, s1) * phi(w, mu2, s2) *
           std::exp(std::complex<double>(0.0, -w * dt));
  };
  const double lo = std::max(mu1 - 12.0 * s1, mu2 - 12.0 * s2);
  const double hi = std::min(mu1 + 12.0 * s1, mu2 + 12.0 * s2);
  if (lo >= hi) return {0.0, 0.0};

  const double periods = (hi - lo) * std::abs(dt) / (2.0 * std::numbers::pi);
  int panels = 512 + 32 * static_cast<int>(periods);
  if (panels % 2) ++panels;
  std::complex<double> prev = composite_simpson(integrand, lo, hi, panels);
  for (int it = 0; it < 6; ++it) {
    panels *= 2;
    const std::complex<double> cur = composite_simpson(integrand, lo, hi, panels);
    if (std::abs(cur - prev) <= 15.0 * tol) return cur;
    prev = cur;
  }
  return prev;
}

/// Permanent by the defining permutation sum; exponential-factorial cost,
/// fine up to n ~ 8 in tests.
inline std::complex<double> naive_permanent(
    std::span<const std::complex<double>> m, int n) {
  if (n == 0) return {1.0, 0.0};
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::complex<double> acc{0.0, 0.0};
  do {
    std::complex<double> prod{1.0, 0.0};
    for (int i = 0; i < n; ++i) prod *= m[static_cast<std::size_t>(i) * n + perm[i]];
    acc += prod;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return acc;
}

/// Upper-tail probability of Chi^2(df) at x via the regularized incomplete
/// gamma function Q(df/2, x/2) (series / continued-fraction split).
inline double chi2_sf(double x, int df) {
  const double a = 0.5 * df;
  const double xx = 0.5 * x;
  if (xx <= 0.0) return 1.0;
  auto gamma_p_series = [&](double aa, double z) {
    double sum = 1.0 / aa;
    double term = sum;
    for (int n = 1; n < 600; ++n) {
      term *= z / (aa + n);
      sum += term;
      if (std::abs(term) < std::abs(sum) * 1e-16) break;
    }
    return sum * std::exp(-z + aa * std::log(z) - std::lgamma(aa));
  };
  auto gamma_q_cf = [&](double aa, double z) {
    double b = z + 1.0 - aa;
    double c = 1e308;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 600; ++i) {
      const double an = -i * (i - aa);
      b += 2.0;
      d = an * d + b;
      if (std::abs(d) < 1e-300) d = 1e-300;
      c = b + an / c;
      if (std::abs(c) < 1e-300) c = 1e-300;
      d = 1.0 / d;
      const double del = d * c;
      h *= del;
      if (std::abs(del - 1.0) < 1e-16) break;
    }
    return h * std::exp(-z + aa * std::log(z) - std::lgamma(aa));
  };
  if (xx < a + 1.0) return 1.0 - gamma_p_series(a, xx);
  return gamma_q_cf(a, xx);
}

}  // namespace focksim::testing
