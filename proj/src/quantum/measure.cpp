#include "focksim/quantum/measure.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

#include "focksim/errors.hpp"

namespace focksim::quantum {

using fock::kDegenerateNormEps;
using fock::PhotonPool;
using fock::PoolExpansion;
using fock::RouteId;

NumberDistribution route_number_distribution(const PhotonPool& pool,
                                             RouteId route, int cap) {
  if (pool.vacuum()) return {route, {1.0}};
  PoolExpansion expansion(pool, cap);
  std::vector<double> w = expansion.route_count_weights(route);
  double total = 0.0;
  for (double x : w) total += x;

  NumberDistribution dist{route, std::vector<double>(w.size(), 0.0)};
  if (total > 1.0) {
    // Guard for slightly super-normalized pools (finite-isolation leakage).
    for (std::size_t k = 0; k < w.size(); ++k) dist.probabilities[k] = w[k] / total;
  } else {
    for (std::size_t k = 0; k < w.size(); ++k) dist.probabilities[k] = w[k];
    dist.probabilities[0] += 1.0 - total;  // loss deficit arrives as vacuum
  }
  double sum = 0.0;
  for (double& p : dist.probabilities) {
    p = std::clamp(p, 0.0, 1.0);
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw std::runtime_error("route_number_distribution: sum " +
                             std::to_string(sum));
  }
  return dist;
}

int sample_count(const NumberDistribution& dist, RandomStream& rng) {
  if (dist.probabilities.empty()) {
    throw std::invalid_argument("sample_count: empty distribution");
  }
  const double u = rng.uniform();
  double cum = 0.0;
  const int n = static_cast<int>(dist.probabilities.size());
  for (int k = 0; k < n; ++k) {
    cum += dist.probabilities[k];
    if (u < cum) return k;
  }
  return n - 1;
}

namespace {

// Subsets of {0..m-1} of size k in increasing mask order; deterministic
// candidate ordering for the inverse-CDF subset draw.
std::vector<std::uint32_t> size_k_masks(int m, int k) {
  std::vector<std::uint32_t> masks;
  for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
    if (std::popcount(mask) == k) masks.push_back(mask);
  }
  return masks;
}

}  // namespace

SubsetWeights collapse_subset_weights(const PhotonPool& pool, RouteId route,
                                      int k, int cap) {
  const int m = static_cast<int>(pool.photons.size());
  if (k < 0 || k > m) {
    throw std::invalid_argument("collapse: k out of range");
  }
  PoolExpansion expansion(pool, cap);
  SubsetWeights sw;
  sw.masks = size_k_masks(m, k);
  sw.weights.resize(sw.masks.size());
  for (std::size_t i = 0; i < sw.masks.size(); ++i) {
    sw.weights[i] = expansion.subset_weight(route, sw.masks[i]);
    sw.total += sw.weights[i];
  }
  return sw;
}

CollapseOutcome collapse(const PhotonPool& pool, RouteId route, int k,
                         RandomStream& rng, int cap) {
  const int m = static_cast<int>(pool.photons.size());
  if (k < 0 || k > m) {
    throw std::invalid_argument("collapse: k out of range");
  }
  if (pool.vacuum()) return {0, {}, pool};

  const std::uint64_t draws_before = rng.draws();
  std::uint32_t chosen = 0;
  if (k > 0) {
    const SubsetWeights sw = collapse_subset_weights(pool, route, k, cap);
    if (sw.total <= kDegenerateNormEps) {
      throw DegenerateStateError(
          "collapse: outcome k=" + std::to_string(k) + " on route " +
          std::to_string(route.value) + " has no support");
    }
    chosen = sw.masks[0];
    if (sw.masks.size() > 1) {
      const double u = rng.uniform() * sw.total;
      double cum = 0.0;
      for (std::size_t i = 0; i < sw.masks.size(); ++i) {
        cum += sw.weights[i];
        chosen = sw.masks[i];
        if (u < cum) break;
      }
    }
  }
  CollapseOutcome out = collapse_with_subset(pool, route, k, chosen, cap);
  out.surviving_pool.record_draws(rng.key(), rng.draws() - draws_before);
  return out;
}

CollapseOutcome collapse_with_subset(const PhotonPool& pool, RouteId route,
                                     int k, std::uint32_t mask, int cap) {
  const int m = static_cast<int>(pool.photons.size());
  if (k < 0 || k > m || std::popcount(mask) != k) {
    throw std::invalid_argument("collapse: subset size does not match k");
  }
  if (pool.vacuum()) return {0, {}, pool};

  const double norm_orig = pool_norm(pool, cap);
  const double deficit = std::max(0.0, 1.0 - norm_orig);
  const std::uint32_t chosen = mask;

  CollapseOutcome out;
  out.detected_count = k;
  out.surviving_pool.pool_id = pool.pool_id;
  out.surviving_pool.rng_lineage = pool.rng_lineage;
  for (int p = 0; p < m; ++p) {
    if (chosen & (1u << p)) {
      out.removed_photon_indices.push_back(p);
      continue;
    }
    fock::Photon survivor;
    for (const fock::PhotonState& s : pool.photons[p].states) {
      if (s.route != route) survivor.states.push_back(s);
    }
    // A photon with every state on the measured route that was not detected
    // has been absorbed upstream; it simply disappears.
    if (!survivor.states.empty()) {
      out.surviving_pool.photons.push_back(std::move(survivor));
    }
  }

  if (!out.surviving_pool.photons.empty()) {
    const double raw = fock::pool_norm(out.surviving_pool, cap);
    const int mprime = static_cast<int>(out.surviving_pool.photons.size());
    double target = 1.0;
    if (k == 0) {
      // Conditioned on "nothing detected here", the loss deficit stays with
      // the survivors so downstream detectors see correct probabilities.
      const double denom = raw + deficit;
      if (denom <= kDegenerateNormEps) {
        throw DegenerateStateError("collapse: zero-norm conditioning");
      }
      target = raw / denom;
    }
    if (raw <= kDegenerateNormEps) {
      if (k == 0 && deficit > kDegenerateNormEps) {
        out.surviving_pool.photons.clear();  // fully absorbed
      } else {
        throw DegenerateStateError("collapse: surviving pool has zero norm");
      }
    } else {
      const double scale =
          std::pow(target / raw, 1.0 / (2.0 * static_cast<double>(mprime)));
      for (fock::Photon& ph : out.surviving_pool.photons) {
        for (fock::PhotonState& s : ph.states) s.coefficient *= scale;
      }
    }
  }
  return out;
}

PhotonPool merge_pools(const PhotonPool& a, const PhotonPool& b,
                       fock::PoolIdAllocator& ids) {
  if (a.pool_id == b.pool_id) {
    throw std::invalid_argument("merge_pools: cannot merge a pool with itself");
  }
  PhotonPool merged;
  merged.pool_id = ids.allocate();
  merged.photons = a.photons;
  merged.photons.insert(merged.photons.end(), b.photons.begin(),
                        b.photons.end());
  merged.rng_lineage = a.rng_lineage;
  merged.rng_lineage.insert(merged.rng_lineage.end(), b.rng_lineage.begin(),
                            b.rng_lineage.end());
  return merged;
}

}  // namespace focksim::quantum
