#pragma once
#include <complex>

#include "focksim/fock/state.hpp"

namespace focksim::fock {

/// Closed form of the wavepacket overlap
///     integral dw phi1(w) phi2(w) exp(-i w (tau2 - tau1))
/// for Gaussian spectral amplitudes. For equal modes the modulus is
/// exp(-sigma^2 dt^2 / 2). Throws std::invalid_argument on non-finite
/// inputs or non-positive sigma.
std::complex<double> spectral_overlap(const SpectralMode& s1, double tau1,
                                      const SpectralMode& s2, double tau2);

/// Inner product of two Jones vectors (alpha, beta e^{-i theta}):
///     alpha1*alpha2 + beta1*beta2 * exp(-i (theta2 - theta1)).
std::complex<double> polarization_overlap(const JonesPolarization& p1,
                                          const JonesPolarization& p2);

/// Full single-particle overlap <a|b>: zero when routes differ, otherwise
/// the coefficient product times the relative-phase factor times spectral
/// and polarization overlaps. Hermitian under argument swap.
std::complex<double> state_overlap(const PhotonState& a, const PhotonState& b);

}  // namespace focksim::fock
