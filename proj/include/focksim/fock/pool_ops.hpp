#pragma once
#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "focksim/fock/permanent.hpp"
#include "focksim/fock/state.hpp"

namespace focksim::fock {

/// Tolerated imaginary residue when a configuration-pair sum must be real.
inline constexpr double kNormImagTol = 1e-9;

/// Below this, a norm is treated as zero (degenerate post-selection).
inline constexpr double kDegenerateNormEps = 1e-12;

/// Guard against configuration blowup in pathological pools.
inline constexpr std::size_t kMaxConfigurations = std::size_t{1} << 20;

/// Vacuum expectation value <0| prod_i b(A_i) prod_j bdag(B_j) |0> for
/// bosonic wavepacket operators: the permanent of the Gram matrix
/// G_ij = state_overlap(A_i, B_j), with coefficients and phases folded in.
/// A and B pick one state per photon; lengths must match.
std::complex<double> configuration_inner(std::span<const PhotonState> bra,
                                         std::span<const PhotonState> ket,
                                         int cap = kDefaultPhotonCap);

/// <psi|psi> of the full pool: sum of configuration_inner over all
/// configuration pairs. Real and non-negative up to kNormImagTol residue,
/// which is checked and discarded. Empty pool has norm 1.
double pool_norm(const PhotonPool& pool, int cap = kDefaultPhotonCap);

/// Returns a copy with every coefficient scaled by norm^(-1/(2m)) so the
/// pool norm becomes 1. Throws DegenerateStateError on a zero-norm pool.
PhotonPool normalize_pool(const PhotonPool& pool, int cap = kDefaultPhotonCap);

/// Enumeration of one pool's configurations with cached pairwise overlaps.
///
/// Configurations (one state choice per photon) are grouped by their
/// per-route photon counts; configurations in different groups are exactly
/// orthogonal by route orthogonality, so only within-group pairs are ever
/// evaluated. Group pair sums are computed once at construction and reused
/// by the norm, the per-route number distributions, and collapse weights.
class PoolExpansion {
 public:
  PoolExpansion(const PhotonPool& pool, int cap = kDefaultPhotonCap);

  int photon_count() const { return static_cast<int>(state_counts_.size()); }
  std::size_t configuration_count() const { return config_states_.size(); }

  /// <psi|psi>; imaginary residue checked against kNormImagTol.
  double norm() const;

  /// weights[k] = sum of configuration pairs whose count on `route` is k.
  /// Dividing by norm() gives the photon-number distribution on the route.
  std::vector<double> route_count_weights(RouteId route) const;

  /// Diagonal weight of the component where exactly the photons in `mask`
  /// (bit m = photon m) occupy `route`. Non-negative.
  double subset_weight(RouteId route, std::uint32_t mask) const;

 private:
  struct Group {
    std::vector<std::pair<std::uint32_t, int>> signature;  // route -> count
    std::vector<std::uint32_t> configs;                    // indices
    std::complex<double> pair_sum{0.0, 0.0};
  };

  std::complex<double> pair_inner(std::uint32_t a, std::uint32_t b) const;
  std::uint32_t route_mask(std::uint32_t config, RouteId route) const;

  std::vector<int> state_counts_;          // states per photon
  std::vector<int> state_offsets_;         // photon -> global state base
  std::vector<RouteId> state_routes_;      // by global state index
  std::vector<std::complex<double>> overlap_;  // dense global x global
  std::vector<std::uint16_t> config_states_;   // configs x photons, global idx
  std::vector<std::uint32_t> config_group_;
  std::vector<Group> groups_;
  int cap_;
};

}  // namespace focksim::fock
