#pragma once
// Random-pool generators and the device conservation sweep shared by the
// unit tests and the acceptance suite.

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "focksim/components/components.hpp"
#include "focksim/fock/pool_ops.hpp"
#include "focksim/rng.hpp"

namespace focksim::testing {

inline fock::PhotonState random_state(RandomStream& rng, std::uint32_t route) {
  fock::PhotonState s;
  s.route = {route};
  s.delay = rng.uniform(-20e-12, 20e-12);
  s.phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
  s.spectrum.mu = rng.uniform(1.0e15, 1.4e15);
  s.spectrum.sigma = rng.uniform(1e11, 6e11);
  const double angle = rng.uniform(0.0, std::numbers::pi / 2);
  s.polarization = {std::cos(angle), std::sin(angle),
                    rng.uniform(0.0, 2.0 * std::numbers::pi)};
  s.coefficient = rng.uniform(0.2, 1.0) * (rng.uniform() < 0.5 ? -1.0 : 1.0);
  return s;
}

/// Up to `max_photons` photons, each superposed over up to `max_states`
/// states drawn from `routes`; normalized.
inline fock::PhotonPool random_pool(RandomStream& rng,
                                    const std::vector<std::uint32_t>& routes,
                                    int max_photons = 3, int max_states = 3) {
  fock::PhotonPool pool;
  pool.pool_id = 1;
  const int n_photons = 1 + static_cast<int>(rng.uniform() * max_photons);
  for (int p = 0; p < n_photons; ++p) {
    fock::Photon ph;
    const int n_states = 1 + static_cast<int>(rng.uniform() * max_states);
    for (int s = 0; s < n_states; ++s) {
      const std::uint32_t route =
          routes[static_cast<std::size_t>(rng.uniform() * routes.size())];
      ph.states.push_back(random_state(rng, route));
    }
    fock::merge_duplicate_states(ph);
    if (ph.states.empty()) ph.states.push_back(random_state(rng, routes[0]));
    pool.photons.push_back(ph);
  }
  return fock::normalize_pool(pool);
}

/// Exactly one photon carries exactly one state on `active_route`; all
/// other photons live on the spectator routes. The domain where a
/// target-overwriting modulator is norm-preserving.
inline fock::PhotonPool single_on_route_pool(
    RandomStream& rng, std::uint32_t active_route,
    const std::vector<std::uint32_t>& spectator_routes) {
  fock::PhotonPool pool;
  pool.pool_id = 1;
  pool.photons.push_back(fock::Photon{{random_state(rng, active_route)}});
  const int extra = static_cast<int>(rng.uniform() * 3);
  for (int p = 0; p < extra; ++p) {
    const std::uint32_t route = spectator_routes[static_cast<std::size_t>(
        rng.uniform() * spectator_routes.size())];
    pool.photons.push_back(fock::Photon{{random_state(rng, route)}});
  }
  return fock::normalize_pool(pool);
}

struct ConservationCase {
  std::string device;
  double max_error = 0.0;
};

/// Applies every lossless device to pools randomized within its
/// norm-preserving domain and records the worst |norm - 1|. Devices that
/// overwrite a degree of freedom (modulators) are exercised on
/// single-on-route pools; the Stokes waveplate likewise, since it drops the
/// global Jones phase.
inline std::vector<ConservationCase> lossless_conservation_sweep(
    RandomStream& rng, int pools_per_device) {
  namespace cp = focksim::components;
  std::vector<ConservationCase> cases;

  auto run = [&](const std::string& name, auto make_pool, auto apply) {
    ConservationCase c{name, 0.0};
    for (int i = 0; i < pools_per_device; ++i) {
      const fock::PhotonPool pool = make_pool();
      const fock::PhotonPool out = apply(pool);
      c.max_error =
          std::max(c.max_error, std::abs(fock::pool_norm(out) - 1.0));
    }
    cases.push_back(c);
  };

  const std::vector<std::uint32_t> two_routes = {0, 1};
  auto full_pool = [&] { return random_pool(rng, two_routes); };
  auto single_pool = [&] { return single_on_route_pool(rng, 0, {7, 8}); };

  run("bs", full_pool, [&](const fock::PhotonPool& p) {
    cp::BsParams bs;
    bs.ratio_t = rng.uniform(0.05, 0.95);
    bs.ratio_r = 1.0 - bs.ratio_t;
    bs.in_a = {0};
    bs.in_b = {1};
    bs.out_c = {2};
    bs.out_d = {3};
    return cp::apply_bs(p, bs);
  });
  run("pbs", full_pool, [&](const fock::PhotonPool& p) {
    cp::PbsParams pbs;
    pbs.extinction_ratio = std::pow(10.0, rng.uniform(0.5, 6.0));
    pbs.in_a = {0};
    pbs.in_b = {1};
    pbs.out_c = {2};
    pbs.out_d = {3};
    return cp::apply_pbs(p, pbs);
  });
  run("pbs_ideal", full_pool, [&](const fock::PhotonPool& p) {
    cp::PbsParams pbs;
    pbs.in_a = {0};
    pbs.in_b = {1};
    pbs.out_c = {2};
    pbs.out_d = {3};
    return cp::apply_pbs(p, pbs);
  });
  run("attenuator", full_pool, [&](const fock::PhotonPool& p) {
    cp::AttenuatorParams a;
    a.in = {0};
    a.out = {4};
    return cp::apply_attenuator(p, a);
  });
  run("filter", full_pool, [&](const fock::PhotonPool& p) {
    cp::FilterParams f;
    f.in_band_loss_db = 0.0;
    f.out_of_band_loss_db = 0.0;
    f.band_lo = 1.1e15;
    f.band_hi = 1.3e15;
    f.in = {0};
    f.out = {4};
    return cp::apply_filter(p, f);
  });
  run("circulator", full_pool, [&](const fock::PhotonPool& p) {
    cp::CirculatorParams c;
    c.in = {0};
    c.out = {4};
    return cp::apply_circulator(p, c);
  });
  run("isolator_fwd", full_pool, [&](const fock::PhotonPool& p) {
    cp::IsolatorParams iso;
    iso.isolation_db = 60.0;
    iso.forward = true;
    iso.in = {0};
    iso.out = {4};
    return cp::apply_isolator(p, iso);
  });
  run("switch", full_pool, [&](const fock::PhotonPool& p) {
    cp::SwitchParams sw;
    sw.isolation_db = std::numeric_limits<double>::infinity();
    sw.selected_port = 1 + (rng.uniform() < 0.5 ? 1 : 0);
    sw.in = {0};
    sw.out_1 = {4};
    sw.out_2 = {5};
    return cp::apply_switch(p, sw);
  });
  run("fiber", full_pool, [&](const fock::PhotonPool& p) {
    cp::FiberParams f;
    f.length_km = rng.uniform(0.0, 60.0);
    f.in = {0};
    f.out = {4};
    RandomStream tmp(rng.next_u64());
    return cp::apply_fiber(p, f, tmp);
  });
  run("faraday_mirror", full_pool, [&](const fock::PhotonPool& p) {
    cp::FaradayMirrorParams fm;
    fm.theta = rng.uniform(0.0, std::numbers::pi);
    fm.in = {0};
    fm.out = {4};
    return cp::apply_faraday_mirror(p, fm);
  });
  run("phase_modulator", single_pool, [&](const fock::PhotonPool& p) {
    cp::PhaseModulatorParams pm;
    pm.target_phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
    pm.in = {0};
    pm.out = {4};
    return cp::apply_phase_modulator(p, pm);
  });
  run("polarization_modulator", single_pool, [&](const fock::PhotonPool& p) {
    cp::PolarizationModulatorParams pm;
    const double angle = rng.uniform(0.0, std::numbers::pi / 2);
    pm.target = {std::cos(angle), std::sin(angle),
                 rng.uniform(0.0, 2.0 * std::numbers::pi)};
    pm.in = {0};
    pm.out = {4};
    return cp::apply_polarization_modulator(p, pm);
  });
  run("waveplate", single_pool, [&](const fock::PhotonPool& p) {
    cp::WaveplateParams wp;
    wp.relative_phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
    wp.offset_angle = rng.uniform(0.0, std::numbers::pi);
    wp.in = {0};
    wp.out = {4};
    return cp::apply_waveplate(p, wp);
  });

  return cases;
}

/// Single-photon transmission scaling: applies each lossy device to a fresh
/// photon and reports the worst |p_transmitted - 10^(-l/10)| over randomized
/// losses, with the probability read back through the route weights.
inline std::vector<ConservationCase> lossy_scaling_sweep(RandomStream& rng,
                                                         int pools_per_device) {
  namespace cp = focksim::components;
  std::vector<ConservationCase> cases;

  auto transmitted = [](const fock::PhotonPool& pool,
                        std::vector<std::uint32_t> routes) {
    fock::PoolExpansion expansion(pool);
    double p = 0.0;
    for (std::uint32_t r : routes) {
      p += expansion.route_count_weights({r})[1];
    }
    return p;
  };

  auto run = [&](const std::string& name, auto apply) {
    ConservationCase c{name, 0.0};
    for (int i = 0; i < pools_per_device; ++i) {
      fock::PhotonPool pool;
      pool.pool_id = 1;
      fock::PhotonState s = random_state(rng, 0);
      s.coefficient = 1.0;
      pool.photons.push_back(fock::Photon{{s}});
      const double loss_db = rng.uniform(0.1, 20.0);
      const double expected = std::pow(10.0, -loss_db / 10.0);
      const double got = apply(pool, loss_db);
      c.max_error = std::max(c.max_error, std::abs(got - expected));
    }
    cases.push_back(c);
  };

  run("attenuator", [&](const fock::PhotonPool& p, double l) {
    cp::AttenuatorParams a;
    a.loss_db = l;
    a.in = {0};
    a.out = {4};
    return transmitted(cp::apply_attenuator(p, a), {4});
  });
  run("bs", [&](const fock::PhotonPool& p, double l) {
    cp::BsParams bs;
    bs.ratio_t = rng.uniform(0.1, 0.9);
    bs.ratio_r = 1.0 - bs.ratio_t;
    bs.loss_db = l;
    bs.in_a = {0};
    bs.in_b = {1};
    bs.out_c = {2};
    bs.out_d = {3};
    return transmitted(cp::apply_bs(p, bs), {2, 3});
  });
  run("pbs", [&](const fock::PhotonPool& p, double l) {
    cp::PbsParams pbs;
    pbs.loss_h_db = l;
    pbs.loss_v_db = l;
    pbs.extinction_ratio = std::pow(10.0, rng.uniform(1.0, 5.0));
    pbs.in_a = {0};
    pbs.in_b = {1};
    pbs.out_c = {2};
    pbs.out_d = {3};
    return transmitted(cp::apply_pbs(p, pbs), {2, 3});
  });
  run("filter_in_band", [&](const fock::PhotonPool& p, double l) {
    cp::FilterParams f;
    f.in_band_loss_db = l;
    f.out_of_band_loss_db = l + 30.0;
    f.band_lo = 0.9e15;
    f.band_hi = 1.5e15;
    f.in = {0};
    f.out = {4};
    return transmitted(cp::apply_filter(p, f), {4});
  });
  run("circulator", [&](const fock::PhotonPool& p, double l) {
    cp::CirculatorParams c;
    c.loss_db = l;
    c.in = {0};
    c.out = {4};
    return transmitted(cp::apply_circulator(p, c), {4});
  });
  run("phase_modulator", [&](const fock::PhotonPool& p, double l) {
    cp::PhaseModulatorParams pm;
    pm.loss_db = l;
    pm.in = {0};
    pm.out = {4};
    return transmitted(cp::apply_phase_modulator(p, pm), {4});
  });
  run("polarization_modulator", [&](const fock::PhotonPool& p, double l) {
    cp::PolarizationModulatorParams pm;
    pm.loss_db = l;
    pm.in = {0};
    pm.out = {4};
    return transmitted(cp::apply_polarization_modulator(p, pm), {4});
  });
  run("isolator_reverse", [&](const fock::PhotonPool& p, double l) {
    cp::IsolatorParams iso;
    iso.loss_db = 0.0;
    iso.isolation_db = l;
    iso.forward = false;
    iso.in = {0};
    iso.out = {4};
    return transmitted(cp::apply_isolator(p, iso), {4});
  });
  run("switch_leak", [&](const fock::PhotonPool& p, double l) {
    cp::SwitchParams sw;
    sw.loss_db = 0.0;
    sw.isolation_db = l;
    sw.selected_port = 1;
    sw.in = {0};
    sw.out_1 = {4};
    sw.out_2 = {5};
    return transmitted(cp::apply_switch(p, sw), {5});
  });
  run("waveplate", [&](const fock::PhotonPool& p, double l) {
    cp::WaveplateParams wp;
    wp.loss_db = l;
    wp.relative_phase = rng.uniform(0.0, 6.28);
    wp.offset_angle = rng.uniform(0.0, 3.14);
    wp.in = {0};
    wp.out = {4};
    return transmitted(cp::apply_waveplate(p, wp), {4});
  });
  run("fiber", [&](const fock::PhotonPool& p, double l) {
    cp::FiberParams f;
    f.alpha_db_per_km = l / 25.0;
    f.length_km = 25.0;
    f.in = {0};
    f.out = {4};
    RandomStream tmp(rng.next_u64());
    return transmitted(cp::apply_fiber(p, f, tmp), {4});
  });
  run("faraday_mirror", [&](const fock::PhotonPool& p, double l) {
    cp::FaradayMirrorParams fm;
    fm.loss_db = l;
    fm.theta = rng.uniform(0.0, 3.14);
    fm.in = {0};
    fm.out = {4};
    return transmitted(cp::apply_faraday_mirror(p, fm), {4});
  });

  return cases;
}

}  // namespace focksim::testing
