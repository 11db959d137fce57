#include "focksim/detector/spd.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "focksim/errors.hpp"
#include "focksim/quantum/measure.hpp"

namespace focksim::detector {

void validate(const SpdParams& p) {
  if (p.efficiency < 0.0 || p.efficiency > 1.0) {
    throw std::invalid_argument("spd: efficiency must be in [0,1]");
  }
  if (p.afterpulse_prob < 0.0 || p.afterpulse_prob > 1.0) {
    throw std::invalid_argument("spd: afterpulse probability must be in [0,1]");
  }
  if (p.dark_count_rate < 0.0) {
    throw std::invalid_argument("spd: dark count rate must be >= 0");
  }
  if (p.gate_width < 0.0) {
    throw std::invalid_argument("spd: gate width must be >= 0");
  }
  if (p.dark_count_rate * p.gate_width > 1.0) {
    throw std::invalid_argument("spd: p_d * gate width must be <= 1");
  }
  if (p.timing_jitter < 0.0) {
    throw std::invalid_argument("spd: timing jitter must be >= 0");
  }
}

double click_probability(int n, const SpdParams& p, double effective_p_a) {
  if (n < 0) throw std::invalid_argument("click_probability: n must be >= 0");
  const double pc = 1.0 - std::pow(1.0 - p.efficiency, n) *
                              (1.0 - p.dark_count_rate * p.gate_width) *
                              (1.0 - effective_p_a);
  return std::clamp(pc, 0.0, 1.0);
}

double click_probability(int n, const SpdParams& p) {
  return click_probability(n, p, p.afterpulse_prob);
}

DetectResult detect(const fock::PhotonPool& pool, fock::RouteId route,
                    int detector_index, std::uint64_t trial,
                    double arrival_time, bool in_gate, const SpdParams& params,
                    bool last_clicked, RandomStream& rng, int cap) {
  validate(params);
  DetectResult result;
  result.record.detector = detector_index;
  result.record.trial = trial;
  result.record.timestamp = arrival_time;

  // The route is always consumed, clickable or not.
  int k = 0;
  try {
    const quantum::NumberDistribution dist =
        quantum::route_number_distribution(pool, route, cap);
    k = quantum::sample_count(dist, rng);
    quantum::CollapseOutcome outcome = quantum::collapse(pool, route, k, rng, cap);
    result.surviving_pool = std::move(outcome.surviving_pool);
  } catch (const DegenerateStateError&) {
    result.record.aborted = true;
    result.surviving_pool = pool;
    return result;
  }

  if (!params.enabled || !in_gate) return result;

  const double p_a = params.afterpulse_model
                         ? params.afterpulse_model(params.afterpulse_prob,
                                                   last_clicked)
                         : params.afterpulse_prob;
  const double pc = click_probability(k, params, p_a);
  result.record.clicked = rng.uniform() < pc;
  if (params.resolves_photon_number) result.record.photon_count = k;
  if (params.timing_jitter > 0.0) {
    result.record.timestamp = arrival_time + rng.normal(0.0, params.timing_jitter);
  }
  return result;
}

}  // namespace focksim::detector
