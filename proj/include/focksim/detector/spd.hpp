#pragma once
#include <cstdint>
#include <functional>

#include "focksim/fock/permanent.hpp"
#include "focksim/fock/state.hpp"
#include "focksim/rng.hpp"

namespace focksim::detector {

struct SpdParams {
  double efficiency = 1.0;       // eta
  double dark_count_rate = 0.0;  // p_d, probability per unit time
  double afterpulse_prob = 0.0;  // p_a
  double timing_jitter = 0.0;    // Gaussian sigma of the readout time, s
  bool resolves_photon_number = false;
  bool enabled = true;
  double gate_width = 1e-9;  // delta t

  /// Optional stateful afterpulse model: maps (base p_a, previous record
  /// clicked) to the p_a used for this gate. Default: constant p_a.
  std::function<double(double base, bool last_clicked)> afterpulse_model;
};

void validate(const SpdParams& p);

struct DetectionRecord {
  int detector = -1;  // index into the topology's detector table
  std::uint64_t trial = 0;
  bool clicked = false;
  int photon_count = -1;  // >= 0 only for number-resolving detectors
  double timestamp = 0.0;  // s, arrival + jitter draw
  bool aborted = false;    // degenerate post-selection
};

/// Click probability for n arrived photons:
///     1 - (1 - eta)^n (1 - p_d dt) (1 - p_a), clamped to [0, 1].
double click_probability(int n, const SpdParams& p);
double click_probability(int n, const SpdParams& p, double effective_p_a);

struct DetectResult {
  DetectionRecord record;
  fock::PhotonPool surviving_pool;
};

/// Full SPD measurement: samples the arrived photon number from the pool's
/// route distribution, collapses the pool, then rolls the click and the
/// jitter. A disabled detector or an out-of-gate arrival still absorbs the
/// route (photons are traced out) but can never click. Degenerate
/// conditioning is reported through `record.aborted` instead of throwing.
DetectResult detect(const fock::PhotonPool& pool, fock::RouteId route,
                    int detector_index, std::uint64_t trial,
                    double arrival_time, bool in_gate, const SpdParams& params,
                    bool last_clicked, RandomStream& rng,
                    int cap = fock::kDefaultPhotonCap);

}  // namespace focksim::detector
