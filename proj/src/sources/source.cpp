#include "focksim/sources/source.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "focksim/errors.hpp"

namespace focksim::sources {

void validate(const SourceParams& p) {
  if (p.mean_photon_number < 0.0) {
    throw std::invalid_argument("source: mean photon number must be >= 0");
  }
  if (!(p.repetition_period > 0.0)) {
    throw std::invalid_argument("source: repetition period must be > 0");
  }
  fock::validate(p.spectrum);
  fock::validate(p.polarization);
}

fock::PhotonPool emit_single_photon(const SourceParams& params,
                                    fock::PoolIdAllocator& ids) {
  validate(params);
  fock::PhotonPool pool;
  pool.pool_id = ids.allocate();
  fock::PhotonState s;
  s.route = params.emit_route;
  s.delay = params.delay;
  s.phase = params.phase;
  s.spectrum = params.spectrum;
  s.polarization = params.polarization;
  s.coefficient = 1.0;
  pool.photons.push_back({{s}});
  return pool;
}

namespace {

constexpr int kTruncationHardCap = 170;

// Upper Poisson tail P(N > n) computed from log-space pmf terms. Summing the
// tail (small) instead of the CDF (near 1) keeps the later log1p exact.
double poisson_upper_tail(double mu, int n) {
  const double log_mu = std::log(mu);
  double tail = 0.0;
  double log_term = -mu + (n + 1) * log_mu - std::lgamma(n + 2.0);
  double term = std::exp(log_term);
  for (int j = n + 1; j < n + 2000 && term > 0.0; ++j) {
    tail += term;
    term *= mu / (j + 1);
    if (term < tail * 1e-20) {
      tail += term;
      break;
    }
  }
  return tail;
}

}  // namespace

int truncation_point(double mu, std::uint64_t n_trials, double epsilon) {
  if (!(mu > 0.0)) throw std::invalid_argument("truncation_point: mu must be > 0");
  if (n_trials < 1) throw std::invalid_argument("truncation_point: n_trials must be >= 1");
  if (!(epsilon > 0.0) || !(epsilon < 1.0)) {
    throw std::invalid_argument("truncation_point: epsilon must be in (0,1)");
  }
  const double log_target = std::log1p(-epsilon);
  const double n_mu = static_cast<double>(n_trials);
  for (int n = 0; n <= kTruncationHardCap; ++n) {
    const double tail = poisson_upper_tail(mu, n);
    const double log_cdf = std::log1p(-std::min(tail, 1.0));
    if (n_mu * log_cdf >= log_target) return n;
  }
  throw CapacityError("truncation_point: no solution below " +
                      std::to_string(kTruncationHardCap));
}

WeakCoherentEmission emit_weak_coherent(const SourceParams& params, int n_t,
                                        RandomStream& rng,
                                        fock::PoolIdAllocator& ids) {
  validate(params);
  if (n_t < 0) throw std::invalid_argument("emit_weak_coherent: n_t must be >= 0");

  const std::uint64_t draws_before = rng.draws();
  WeakCoherentEmission out;
  int n = rng.poisson(params.mean_photon_number);
  while (n > n_t) {
    ++out.redraws;
    n = rng.poisson(params.mean_photon_number);
  }
  const double phase = params.phase_randomized
                           ? rng.uniform(0.0, 2.0 * std::numbers::pi)
                           : params.phase;

  out.pool.pool_id = ids.allocate();
  if (n > 0) {
    fock::PhotonState s;
    s.route = params.emit_route;
    s.delay = params.delay;
    s.phase = phase;
    s.spectrum = params.spectrum;
    s.polarization = params.polarization;
    s.coefficient = std::exp(-std::lgamma(n + 1.0) / (2.0 * n));
    out.pool.photons.assign(static_cast<std::size_t>(n), fock::Photon{{s}});
  }
  out.pool.record_draws(rng.key(), rng.draws() - draws_before);
  return out;
}

}  // namespace focksim::sources
