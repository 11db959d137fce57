#pragma once
#include <cstdint>

#include "focksim/fock/state.hpp"
#include "focksim/rng.hpp"

namespace focksim::sources {

struct SourceParams {
  double mean_photon_number = 0.0;  // mu; coherent source only
  fock::SpectralMode spectrum{};
  fock::JonesPolarization polarization{};
  fock::RouteId emit_route{};
  double repetition_period = 1e-9;  // s
  bool phase_randomized = true;
  double delay = 0.0;  // initial wavepacket delay, s
  double phase = 0.0;  // initial phase when not randomized, rad
};

void validate(const SourceParams& p);

/// One photon, one state, coefficient 1, fields from params. Norm 1.
fock::PhotonPool emit_single_photon(const SourceParams& params,
                                    fock::PoolIdAllocator& ids);

/// Minimal n_t such that the probability that any of `n_trials` pulses
/// carries more than n_t photons is at most epsilon:
///     1 - (sum_{n<=n_t} e^-mu mu^n / n!)^n_trials <= epsilon.
/// Evaluated in log space via the upper Poisson tail so it stays exact for
/// huge trial counts. Throws CapacityError if no solution exists below 170.
int truncation_point(double mu, std::uint64_t n_trials, double epsilon);

struct WeakCoherentEmission {
  fock::PhotonPool pool;
  int redraws = 0;  // Poisson draws above n_t that were rejected
};

/// Draws n ~ Poisson(mu) conditioned on n <= n_t (redraw on exceedance,
/// counted), then builds an n-photon pool of identical states sharing one
/// global phase (uniform in [0, 2pi) when phase_randomized). Each photon
/// carries coefficient (1/sqrt(n!))^(1/n) so the n-photon product state is
/// normalized. n = 0 yields a vacuum pool.
WeakCoherentEmission emit_weak_coherent(const SourceParams& params, int n_t,
                                        RandomStream& rng,
                                        fock::PoolIdAllocator& ids);

}  // namespace focksim::sources
