#pragma once
#include <compare>
#include <cstdint>
#include <vector>

namespace focksim::fock {

/// Gaussian spectral amplitude, parameterized in angular frequency.
struct SpectralMode {
  double mu = 1.2153e15;   // center, rad/s (1550 nm carrier by default)
  double sigma = 4.0841e11;  // standard deviation, rad/s

  bool operator==(const SpectralMode&) const = default;
};

/// Real Jones amplitudes with the V-component phase kept separate: the
/// Jones vector is (alpha, beta * exp(-i * delta_phase)).
struct JonesPolarization {
  double alpha = 1.0;
  double beta = 0.0;
  double delta_phase = 0.0;  // rad

  bool operator==(const JonesPolarization&) const = default;
};

/// Opaque identifier of one directed path in the topology. Terms on
/// different routes never interfere.
struct RouteId {
  std::uint32_t value = 0;

  auto operator<=>(const RouteId&) const = default;
};

/// One Fock-basis wavepacket term of a photon's superposition. The
/// coefficient is a signed real scalar; all complex phase lives in `phase`
/// and in the polarization's `delta_phase`.
struct PhotonState {
  RouteId route;
  double delay = 0.0;  // s, relative within the pool
  double phase = 0.0;  // rad, relative within the pool
  SpectralMode spectrum{};
  JonesPolarization polarization{};
  double coefficient = 1.0;

  /// All fields except the coefficient match exactly.
  bool same_mode(const PhotonState& o) const {
    return route == o.route && delay == o.delay && phase == o.phase &&
           spectrum == o.spectrum && polarization == o.polarization;
  }
};

/// One physical photon: a superposition (list) of wavepacket terms.
struct Photon {
  std::vector<PhotonState> states;
};

/// Audit record of randomness consumed on behalf of a pool.
struct RngLineage {
  std::uint64_t stream_key = 0;
  std::uint64_t draws = 0;
};

/// All photons of one correlated system. Unit of merging and collapse.
struct PhotonPool {
  std::uint64_t pool_id = 0;
  std::vector<Photon> photons;
  std::vector<RngLineage> rng_lineage;

  bool vacuum() const { return photons.empty(); }

  void record_draws(std::uint64_t stream_key, std::uint64_t n_draws) {
    if (n_draws == 0) return;
    if (!rng_lineage.empty() && rng_lineage.back().stream_key == stream_key) {
      rng_lineage.back().draws += n_draws;
    } else {
      rng_lineage.push_back({stream_key, n_draws});
    }
  }
};

/// Hands out fresh pool ids. The engine owns one per trial so ids are
/// deterministic; tests construct their own.
struct PoolIdAllocator {
  std::uint64_t next = 1;
  std::uint64_t allocate() { return next++; }
};

inline constexpr double kCoefficientDropEps = 1e-12;

/// Merges terms of one photon that are identical in every non-coefficient
/// field by summing coefficients, then drops terms with negligible weight.
/// Keeps interferometer expansions from growing without bound.
void merge_duplicate_states(Photon& photon);
void merge_duplicate_states(PhotonPool& pool);

/// Throw std::invalid_argument on violated type invariants.
void validate(const SpectralMode& s);
void validate(const JonesPolarization& p);

}  // namespace focksim::fock
