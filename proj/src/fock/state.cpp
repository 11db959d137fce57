#include "focksim/fock/state.hpp"

#include <cmath>
#include <stdexcept>

namespace focksim::fock {

void merge_duplicate_states(Photon& photon) {
  std::vector<PhotonState> merged;
  merged.reserve(photon.states.size());
  for (const PhotonState& s : photon.states) {
    bool found = false;
    for (PhotonState& m : merged) {
      if (m.same_mode(s)) {
        m.coefficient += s.coefficient;
        found = true;
        break;
      }
    }
    if (!found) merged.push_back(s);
  }
  std::erase_if(merged, [](const PhotonState& s) {
    return std::abs(s.coefficient) < kCoefficientDropEps;
  });
  photon.states = std::move(merged);
}

void merge_duplicate_states(PhotonPool& pool) {
  for (Photon& p : pool.photons) merge_duplicate_states(p);
}

void validate(const SpectralMode& s) {
  if (!(s.sigma > 0.0) || !std::isfinite(s.sigma)) {
    throw std::invalid_argument("SpectralMode: sigma must be finite and > 0");
  }
  if (!(s.mu > 0.0) || !std::isfinite(s.mu)) {
    throw std::invalid_argument("SpectralMode: mu must be finite and > 0");
  }
}

void validate(const JonesPolarization& p) {
  if (p.alpha < 0.0 || p.beta < 0.0) {
    throw std::invalid_argument("JonesPolarization: amplitudes must be >= 0");
  }
  const double n = p.alpha * p.alpha + p.beta * p.beta;
  if (std::abs(n - 1.0) > 1e-9) {
    throw std::invalid_argument(
        "JonesPolarization: alpha^2 + beta^2 must equal 1 within 1e-9");
  }
}

}  // namespace focksim::fock
