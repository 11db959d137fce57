#include <cmath>
#include <complex>

#include "doctest.h"
#include "focksim/fock/overlap.hpp"
#include "focksim/rng.hpp"
#include "support/oracles.hpp"

using namespace focksim;
using fock::JonesPolarization;
using fock::PhotonState;
using fock::SpectralMode;

namespace {

PhotonState random_state(RandomStream& rng, std::uint32_t route_max = 2) {
  PhotonState s;
  s.route = {static_cast<std::uint32_t>(rng.uniform() * route_max)};
  s.delay = rng.uniform(-50e-12, 50e-12);
  s.phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
  s.spectrum.mu = rng.uniform(1e14, 2e15);
  s.spectrum.sigma = std::pow(10.0, rng.uniform(9.0, 12.0));
  const double angle = rng.uniform(0.0, std::numbers::pi / 2);
  s.polarization = {std::cos(angle), std::sin(angle),
                    rng.uniform(0.0, 2.0 * std::numbers::pi)};
  s.coefficient = rng.uniform(-1.0, 1.0);
  if (std::abs(s.coefficient) < 0.05) s.coefficient = 0.5;
  return s;
}

}  // namespace

TEST_CASE("identical wavepackets overlap to one") {
  SpectralMode s{1.2e15, 4e11};
  const std::complex<double> v = fock::spectral_overlap(s, 1e-12, s, 1e-12);
  CHECK(v.real() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(v.imag() == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("equal-mode overlap modulus is exp(-sigma^2 dt^2 / 2)") {
  SpectralMode s{1.2153e15, 4.0841e11};
  for (double dt : {1e-12, 5e-12, 10e-12, -3e-12}) {
    const std::complex<double> v = fock::spectral_overlap(s, 0.0, s, dt);
    const double expected = std::exp(-s.sigma * s.sigma * dt * dt / 2.0);
    CHECK(std::abs(v) == doctest::Approx(expected).epsilon(1e-11));
  }
}

TEST_CASE("unequal sigma overlap matches the defining integral") {
  SpectralMode s1{1.2e15, 3e11};
  SpectralMode s2{1.2e15, 6e11};
  const std::complex<double> closed = fock::spectral_overlap(s1, 0.0, s2, 0.0);
  const std::complex<double> quad = testing::spectral_overlap_quadrature(
      s1.mu, s1.sigma, 0.0, s2.mu, s2.sigma, 0.0);
  CHECK(std::abs(closed - quad) < 1e-9);
}

TEST_CASE("closed form vs quadrature over randomized parameters") {
  RandomStream rng(2024);
  for (int i = 0; i < 200; ++i) {
    const double mu1 = rng.uniform(1e14, 2e15);
    const double sig1 = std::pow(10.0, rng.uniform(9.0, 12.0));
    const double sig2 = std::pow(10.0, rng.uniform(9.0, 12.0));
    const double mu2 = (i % 2 == 0)
                           ? mu1
                           : mu1 + rng.uniform(-3.0, 3.0) * std::max(sig1, sig2);
    const double tau1 = rng.uniform(-100e-12, 100e-12);
    const double tau2 = rng.uniform(-100e-12, 100e-12);
    if (mu2 <= 0.0) continue;
    const std::complex<double> closed =
        fock::spectral_overlap({mu1, sig1}, tau1, {mu2, sig2}, tau2);
    const std::complex<double> quad = testing::spectral_overlap_quadrature(
        mu1, sig1, tau1, mu2, sig2, tau2);
    CHECK(std::abs(closed - quad) < 1e-9);
  }
}

TEST_CASE("spectral overlap rejects bad inputs") {
  SpectralMode good{1e15, 1e11};
  CHECK_THROWS_AS(fock::spectral_overlap({1e15, -1.0}, 0, good, 0),
                  std::invalid_argument);
  CHECK_THROWS_AS(fock::spectral_overlap(good, std::nan(""), good, 0),
                  std::invalid_argument);
}

TEST_CASE("polarization overlap basics") {
  const JonesPolarization h{1.0, 0.0, 0.0};
  const JonesPolarization v{0.0, 1.0, 0.0};
  CHECK(fock::polarization_overlap(h, h) == std::complex<double>(1.0, 0.0));
  CHECK(std::abs(fock::polarization_overlap(h, v)) == doctest::Approx(0.0));
  for (double d : {0.3, 1.0, std::numbers::pi / 2}) {
    const JonesPolarization rotated{std::cos(d), std::sin(d), 0.0};
    CHECK(fock::polarization_overlap(h, rotated).real() ==
          doctest::Approx(std::cos(d)).epsilon(1e-12));
  }
}

TEST_CASE("state overlap: route orthogonality, self term, phase factor") {
  RandomStream rng(5);
  PhotonState a = random_state(rng);
  a.coefficient = 0.8;

  PhotonState other_route = a;
  other_route.route = {a.route.value + 1};
  CHECK(fock::state_overlap(a, other_route) == std::complex<double>(0.0, 0.0));

  CHECK(fock::state_overlap(a, a).real() ==
        doctest::Approx(0.64).epsilon(1e-12));

  PhotonState flipped = a;
  flipped.phase = a.phase + std::numbers::pi;
  CHECK(fock::state_overlap(a, flipped).real() ==
        doctest::Approx(-0.64).epsilon(1e-11));
}

TEST_CASE("state overlap is Hermitian and Cauchy-Schwarz bounded") {
  RandomStream rng(99);
  for (int i = 0; i < 300; ++i) {
    const PhotonState a = random_state(rng);
    const PhotonState b = random_state(rng);
    const std::complex<double> ab = fock::state_overlap(a, b);
    const std::complex<double> ba = fock::state_overlap(b, a);
    CHECK(std::abs(ab - std::conj(ba)) < 1e-12);
    const double aa = fock::state_overlap(a, a).real();
    const double bb = fock::state_overlap(b, b).real();
    CHECK(std::norm(ab) <= aa * bb + 1e-12);
  }
}
