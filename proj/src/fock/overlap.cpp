#include "focksim/fock/overlap.hpp"

#include <cmath>
#include <stdexcept>

namespace focksim::fock {

std::complex<double> spectral_overlap(const SpectralMode& s1, double tau1,
                                      const SpectralMode& s2, double tau2) {
  if (!std::isfinite(s1.mu) || !std::isfinite(s2.mu) ||
      !std::isfinite(s1.sigma) || !std::isfinite(s2.sigma) ||
      !std::isfinite(tau1) || !std::isfinite(tau2)) {
    throw std::invalid_argument("spectral_overlap: non-finite input");
  }
  if (!(s1.sigma > 0.0) || !(s2.sigma > 0.0)) {
    throw std::invalid_argument("spectral_overlap: sigma must be > 0");
  }

  const double dt = tau2 - tau1;
  const double v1 = s1.sigma * s1.sigma;
  const double v2 = s2.sigma * s2.sigma;
  const double vsum = v1 + v2;
  const double dmu = s2.mu - s1.mu;
  const double mbar = 0.5 * (s1.mu + s2.mu);

  // Gaussian integral about the mean carrier: with x = w - mbar the
  // integrand is exp(-a x^2 + b x + c) e^{-i mbar dt}, which keeps the large
  // optical-carrier terms out of the exponent so nothing cancels
  // catastrophically.
  const double a = vsum / (4.0 * v1 * v2);
  const std::complex<double> b(dmu * (v1 - v2) / (4.0 * v1 * v2), -dt);
  const double c = -dmu * dmu * vsum / (16.0 * v1 * v2);
  const double prefactor = std::sqrt(2.0 * s1.sigma * s2.sigma / vsum);

  const std::complex<double> exponent =
      b * b / (4.0 * a) + c + std::complex<double>(0.0, -mbar * dt);
  return prefactor * std::exp(exponent);
}

std::complex<double> polarization_overlap(const JonesPolarization& p1,
                                          const JonesPolarization& p2) {
  const double dtheta = p2.delta_phase - p1.delta_phase;
  return p1.alpha * p2.alpha +
         p1.beta * p2.beta * std::exp(std::complex<double>(0.0, -dtheta));
}

std::complex<double> state_overlap(const PhotonState& a, const PhotonState& b) {
  if (a.route != b.route) return {0.0, 0.0};
  const std::complex<double> phase =
      std::exp(std::complex<double>(0.0, b.phase - a.phase));
  return a.coefficient * b.coefficient * phase *
         spectral_overlap(a.spectrum, a.delay, b.spectrum, b.delay) *
         polarization_overlap(a.polarization, b.polarization);
}

}  // namespace focksim::fock
