#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "focksim/detector/spd.hpp"
#include "focksim/engine/topology.hpp"

namespace focksim::engine {

/// Outcome of one trial: pulse-arrival events processed in (timestamp,
/// sequence) order, fully deterministic for a given (topology, seeds).
struct TrialResult {
  std::vector<detector::DetectionRecord> records;
  int undetected_photons = 0;   // photons never consumed by any detector
  int exceedance_redraws = 0;   // weak-coherent draws above the truncation
  bool aborted = false;         // degenerate post-selection ended the trial
};

TrialResult run_trial(const Topology& topo, std::uint64_t master_seed,
                      std::uint64_t point_index, std::uint64_t trial_index);

/// Exact per-detector click probabilities and pair coincidences obtained by
/// enumerating every measurement branch instead of sampling. Requires a
/// deterministic topology (single-photon sources, no fiber disturbance);
/// throws ConfigError otherwise.
struct AnalyticPoint {
  std::vector<double> click_probability;  // per detector
  std::vector<double> coincidence;        // per experiment coincidence pair
  double aborted_probability = 0.0;
};

AnalyticPoint run_point_analytic(const Topology& topo);

struct PointStatistics {
  double sweep_value = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t aborted = 0;
  std::uint64_t undetected_photons = 0;
  std::uint64_t exceedance_redraws = 0;
  std::vector<std::uint64_t> clicks;        // per detector
  std::vector<double> click_freq, click_lo, click_hi;
  std::vector<std::uint64_t> coincidences;  // per pair
  std::vector<double> coin_freq, coin_lo, coin_hi;
  std::vector<detector::DetectionRecord> records;  // kept on request
};

struct ExperimentResult {
  std::vector<std::string> detector_names;
  std::vector<std::pair<std::string, std::string>> pair_names;
  std::vector<PointStatistics> points;
  bool analytic = false;
};

/// Runs the topology's experiment: for each sweep point, `trials` trials
/// with per-trial streams derived from (master_seed, point, trial), plus
/// Wilson 95% intervals on click and coincidence frequencies. Sweep points
/// may be distributed over `n_threads`; results are identical for any
/// thread count.
ExperimentResult run_experiment(const Topology& topo, std::uint64_t master_seed,
                                int n_threads = 1, bool keep_records = false);

/// Per-trial event cap; exceeding it raises CapacityError.
inline constexpr int kMaxEventsPerTrial = 1000000;

}  // namespace focksim::engine
