#include "focksim/fock/pool_ops.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

#include "focksim/errors.hpp"
#include "focksim/fock/overlap.hpp"

namespace focksim::fock {

std::complex<double> configuration_inner(std::span<const PhotonState> bra,
                                         std::span<const PhotonState> ket,
                                         int cap) {
  if (bra.size() != ket.size()) {
    throw std::invalid_argument("configuration_inner: length mismatch");
  }
  const int n = static_cast<int>(bra.size());
  if (n > cap) {
    throw CapacityError("configuration_inner: " + std::to_string(n) +
                        " photons exceeds cap " + std::to_string(cap));
  }
  if (n == 0) return {1.0, 0.0};
  std::vector<std::complex<double>> g(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      g[static_cast<std::size_t>(i) * n + j] = state_overlap(bra[i], ket[j]);
    }
  }
  return permanent(g, n, cap);
}

PoolExpansion::PoolExpansion(const PhotonPool& pool, int cap) : cap_(cap) {
  const int m = static_cast<int>(pool.photons.size());
  if (m > cap) {
    throw CapacityError("pool " + std::to_string(pool.pool_id) + ": " +
                        std::to_string(m) + " photons exceeds cap " +
                        std::to_string(cap));
  }

  state_counts_.resize(m);
  state_offsets_.resize(m);
  std::vector<PhotonState> states;
  for (int p = 0; p < m; ++p) {
    const auto& ph = pool.photons[p].states;
    if (ph.empty()) {
      throw std::invalid_argument("pool photon with no states");
    }
    state_offsets_[p] = static_cast<int>(states.size());
    state_counts_[p] = static_cast<int>(ph.size());
    states.insert(states.end(), ph.begin(), ph.end());
  }
  const std::size_t total_states = states.size();
  state_routes_.resize(total_states);
  for (std::size_t s = 0; s < total_states; ++s) {
    state_routes_[s] = states[s].route;
  }

  overlap_.resize(total_states * total_states);
  for (std::size_t i = 0; i < total_states; ++i) {
    for (std::size_t j = 0; j < total_states; ++j) {
      overlap_[i * total_states + j] = state_overlap(states[i], states[j]);
    }
  }

  std::size_t num_configs = 1;
  for (int p = 0; p < m; ++p) {
    num_configs *= static_cast<std::size_t>(state_counts_[p]);
    if (num_configs > kMaxConfigurations) {
      throw CapacityError("pool expansion exceeds " +
                          std::to_string(kMaxConfigurations) +
                          " configurations");
    }
  }

  config_states_.resize(num_configs * static_cast<std::size_t>(m));
  config_group_.resize(num_configs);
  std::map<std::vector<std::pair<std::uint32_t, int>>, std::uint32_t> group_ids;
  std::vector<int> digits(m, 0);
  for (std::size_t c = 0; c < num_configs; ++c) {
    std::vector<std::pair<std::uint32_t, int>> sig;
    for (int p = 0; p < m; ++p) {
      const int g = state_offsets_[p] + digits[p];
      config_states_[c * m + p] = static_cast<std::uint16_t>(g);
      const std::uint32_t r = state_routes_[g].value;
      auto it = std::lower_bound(
          sig.begin(), sig.end(), r,
          [](const auto& e, std::uint32_t v) { return e.first < v; });
      if (it != sig.end() && it->first == r) {
        ++it->second;
      } else {
        sig.insert(it, {r, 1});
      }
    }
    auto [it, inserted] =
        group_ids.try_emplace(sig, static_cast<std::uint32_t>(groups_.size()));
    if (inserted) {
      groups_.push_back({std::move(sig), {}, {0.0, 0.0}});
    }
    config_group_[c] = it->second;
    groups_[it->second].configs.push_back(static_cast<std::uint32_t>(c));
    // mixed-radix increment
    for (int p = m - 1; p >= 0; --p) {
      if (++digits[p] < state_counts_[p]) break;
      digits[p] = 0;
    }
  }

  for (Group& g : groups_) {
    std::complex<double> acc{0.0, 0.0};
    for (std::uint32_t a : g.configs) {
      for (std::uint32_t b : g.configs) {
        acc += pair_inner(a, b);
      }
    }
    g.pair_sum = acc;
  }
}

std::complex<double> PoolExpansion::pair_inner(std::uint32_t a,
                                               std::uint32_t b) const {
  const int m = photon_count();
  if (m == 0) return {1.0, 0.0};
  const std::size_t s = state_routes_.size();
  std::complex<double> g[kMaxPermanentDim * kMaxPermanentDim];
  for (int p = 0; p < m; ++p) {
    const std::size_t row = config_states_[static_cast<std::size_t>(a) * m + p];
    for (int q = 0; q < m; ++q) {
      const std::size_t col =
          config_states_[static_cast<std::size_t>(b) * m + q];
      g[p * m + q] = overlap_[row * s + col];
    }
  }
  return permanent({g, static_cast<std::size_t>(m) * m}, m, cap_);
}

std::uint32_t PoolExpansion::route_mask(std::uint32_t config,
                                        RouteId route) const {
  const int m = photon_count();
  std::uint32_t mask = 0;
  for (int p = 0; p < m; ++p) {
    const int g = config_states_[static_cast<std::size_t>(config) * m + p];
    if (state_routes_[g] == route) mask |= (1u << p);
  }
  return mask;
}

double PoolExpansion::norm() const {
  std::complex<double> acc{0.0, 0.0};
  for (const Group& g : groups_) acc += g.pair_sum;
  if (std::abs(acc.imag()) > kNormImagTol) {
    throw std::runtime_error("pool_norm: imaginary residue " +
                             std::to_string(acc.imag()));
  }
  return std::max(acc.real(), 0.0);
}

std::vector<double> PoolExpansion::route_count_weights(RouteId route) const {
  const int m = photon_count();
  std::vector<std::complex<double>> acc(m + 1, {0.0, 0.0});
  for (const Group& g : groups_) {
    int k = 0;
    for (const auto& [r, count] : g.signature) {
      if (r == route.value) {
        k = count;
        break;
      }
    }
    acc[k] += g.pair_sum;
  }
  std::vector<double> weights(m + 1, 0.0);
  for (int k = 0; k <= m; ++k) {
    if (std::abs(acc[k].imag()) > kNormImagTol) {
      throw std::runtime_error("route weights: imaginary residue");
    }
    weights[k] = std::max(acc[k].real(), 0.0);
  }
  return weights;
}

double PoolExpansion::subset_weight(RouteId route, std::uint32_t mask) const {
  std::complex<double> acc{0.0, 0.0};
  for (const Group& g : groups_) {
    for (std::uint32_t a : g.configs) {
      if (route_mask(a, route) != mask) continue;
      for (std::uint32_t b : g.configs) {
        if (route_mask(b, route) != mask) continue;
        acc += pair_inner(a, b);
      }
    }
  }
  if (std::abs(acc.imag()) > kNormImagTol) {
    throw std::runtime_error("subset weight: imaginary residue");
  }
  return std::max(acc.real(), 0.0);
}

double pool_norm(const PhotonPool& pool, int cap) {
  return PoolExpansion(pool, cap).norm();
}

PhotonPool normalize_pool(const PhotonPool& pool, int cap) {
  PhotonPool out = pool;
  if (pool.photons.empty()) return out;
  const double n = pool_norm(pool, cap);
  if (n <= kDegenerateNormEps) {
    throw DegenerateStateError("normalize_pool: zero-norm pool " +
                               std::to_string(pool.pool_id));
  }
  const double scale =
      std::pow(n, -1.0 / (2.0 * static_cast<double>(pool.photons.size())));
  for (Photon& ph : out.photons) {
    for (PhotonState& s : ph.states) s.coefficient *= scale;
  }
  return out;
}

}  // namespace focksim::fock
