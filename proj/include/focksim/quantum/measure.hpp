#pragma once
#include <vector>

#include "focksim/fock/pool_ops.hpp"
#include "focksim/fock/state.hpp"
#include "focksim/rng.hpp"

namespace focksim::quantum {

/// Photon-number distribution on one route: probabilities[k] is the chance
/// that exactly k photons arrive, k = 0..photon count.
struct NumberDistribution {
  fock::RouteId route;
  std::vector<double> probabilities;
};

struct CollapseOutcome {
  int detected_count = 0;
  std::vector<int> removed_photon_indices;  // photons consumed by detection
  fock::PhotonPool surviving_pool;
};

/// Born-rule number distribution on `route`. For a normalized pool this is
/// the grouped configuration-pair sum divided by the norm. A sub-normalized
/// pool has lost amplitude to device losses; that deficit is physically
/// "no photon arrives anywhere" and is folded into p_0, which is what makes
/// detection probabilities scale with applied loss.
NumberDistribution route_number_distribution(
    const fock::PhotonPool& pool, fock::RouteId route,
    int cap = fock::kDefaultPhotonCap);

/// Inverse-CDF sample of a NumberDistribution. One uniform draw.
int sample_count(const NumberDistribution& dist, RandomStream& rng);

/// Candidate detected-photon subsets for outcome k, with their diagonal
/// weights (the norm of the component where exactly that subset occupies
/// the route). Masks are in increasing order; bit m = photon m.
struct SubsetWeights {
  std::vector<std::uint32_t> masks;
  std::vector<double> weights;
  double total = 0.0;
};

SubsetWeights collapse_subset_weights(const fock::PhotonPool& pool,
                                      fock::RouteId route, int k,
                                      int cap = fock::kDefaultPhotonCap);

/// Deterministic collapse for a chosen detected subset: removes the subset,
/// strips all states on `route` from survivors, drops photons left with no
/// states (absorbed by loss), and renormalizes. In the k = 0 branch the
/// pool's loss deficit is carried forward so a later detector still sees
/// the correct conditional probability.
CollapseOutcome collapse_with_subset(const fock::PhotonPool& pool,
                                     fock::RouteId route, int k,
                                     std::uint32_t mask,
                                     int cap = fock::kDefaultPhotonCap);

/// Projects `k` photons onto `route` and removes them; the detected subset
/// is sampled from collapse_subset_weights.
CollapseOutcome collapse(const fock::PhotonPool& pool, fock::RouteId route,
                         int k, RandomStream& rng,
                         int cap = fock::kDefaultPhotonCap);

/// Concatenates two disjoint pools into one correlated system under a fresh
/// pool id. Throws std::invalid_argument when both arguments are the same
/// pool.
fock::PhotonPool merge_pools(const fock::PhotonPool& a,
                             const fock::PhotonPool& b,
                             fock::PoolIdAllocator& ids);

}  // namespace focksim::quantum
