#include "focksim/components/components.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace focksim::components {

using fock::JonesPolarization;
using fock::kCoefficientDropEps;
using fock::Photon;
using fock::PhotonPool;
using fock::PhotonState;
using fock::RouteId;

double loss_amplitude(double loss_db) {
  return std::sqrt(std::pow(10.0, -loss_db / 10.0));
}

namespace {

// Rewrites each state through `fn(state, out_states)`; states `fn` leaves
// alone must be pushed through unchanged by the caller's fn.
template <class Fn>
PhotonPool map_states(const PhotonPool& pool, Fn&& fn) {
  PhotonPool out;
  out.pool_id = pool.pool_id;
  out.rng_lineage = pool.rng_lineage;
  out.photons.reserve(pool.photons.size());
  for (const Photon& photon : pool.photons) {
    Photon mapped;
    for (const PhotonState& s : photon.states) fn(s, mapped.states);
    fock::merge_duplicate_states(mapped);
    out.photons.push_back(std::move(mapped));
  }
  return out;
}

// In-place field update for states on one route, with route rewrite.
template <class Fn>
PhotonPool transform_route(const PhotonPool& pool, RouteId in, RouteId out_route,
                           Fn&& fn) {
  return map_states(pool, [&](const PhotonState& s,
                              std::vector<PhotonState>& out) {
    PhotonState t = s;
    if (s.route == in) {
      t.route = out_route;
      fn(t);
    }
    if (std::abs(t.coefficient) >= kCoefficientDropEps) out.push_back(t);
  });
}

void normalize_jones(double& alpha, double& beta) {
  alpha = std::clamp(alpha, 0.0, 1.0);
  beta = std::clamp(beta, 0.0, 1.0);
  const double n = std::hypot(alpha, beta);
  if (n < 1e-12) {
    alpha = 1.0;
    beta = 0.0;
  } else {
    alpha /= n;
    beta /= n;
  }
}

double wrap_angle(double a) {
  a = std::remainder(a, 2.0 * std::numbers::pi);
  return a;
}

}  // namespace

void validate(const BsParams& p) {
  if (std::abs(p.ratio_t + p.ratio_r - 1.0) > 1e-9 || p.ratio_t < 0.0 ||
      p.ratio_r < 0.0) {
    throw std::invalid_argument("bs: splitting ratios must satisfy T + R = 1");
  }
  if (p.loss_db < 0.0) throw std::invalid_argument("bs: loss must be >= 0");
}

void validate(const PbsParams& p) {
  if (!(p.extinction_ratio > 0.0)) {
    throw std::invalid_argument("pbs: extinction ratio must be > 0");
  }
  if (p.loss_h_db < 0.0 || p.loss_v_db < 0.0) {
    throw std::invalid_argument("pbs: losses must be >= 0");
  }
}

void validate(const FiberParams& p) {
  if (p.length_km < 0.0) throw std::invalid_argument("fiber: length must be >= 0");
  if (p.alpha_db_per_km < 0.0) {
    throw std::invalid_argument("fiber: loss per km must be >= 0");
  }
  for (const Disturbance* d : {&p.phase, &p.alpha, &p.beta, &p.theta}) {
    if (d->stddev < 0.0) {
      throw std::invalid_argument("fiber: disturbance stddev must be >= 0");
    }
  }
}

void validate(const SwitchParams& p) {
  if (p.selected_port != 1 && p.selected_port != 2) {
    throw std::invalid_argument("switch: selected port must be 1 or 2");
  }
  if (p.loss_db < 0.0 || p.isolation_db < 0.0) {
    throw std::invalid_argument("switch: losses must be >= 0");
  }
}

PhotonPool apply_bs(const PhotonPool& pool, const BsParams& p) {
  validate(p);
  const double amp = loss_amplitude(p.loss_db);
  const double t = amp * std::sqrt(p.ratio_t);
  const double r = amp * std::sqrt(p.ratio_r);
  return map_states(pool, [&](const PhotonState& s,
                              std::vector<PhotonState>& out) {
    if (s.route != p.in_a && s.route != p.in_b) {
      out.push_back(s);
      return;
    }
    PhotonState to_c = s;
    PhotonState to_d = s;
    to_c.route = p.out_c;
    to_d.route = p.out_d;
    if (s.route == p.in_a) {
      to_c.coefficient = s.coefficient * t;
      to_d.coefficient = -s.coefficient * r;
    } else {
      to_c.coefficient = s.coefficient * r;
      to_d.coefficient = s.coefficient * t;
    }
    if (std::abs(to_c.coefficient) >= kCoefficientDropEps) out.push_back(to_c);
    if (std::abs(to_d.coefficient) >= kCoefficientDropEps) out.push_back(to_d);
  });
}

PhotonPool apply_pbs(const PhotonPool& pool, const PbsParams& p) {
  validate(p);
  const double amp_h = loss_amplitude(p.loss_h_db);
  const double amp_v = loss_amplitude(p.loss_v_db);
  double main_amp = 1.0;
  double leak_amp = 0.0;
  if (std::isfinite(p.extinction_ratio)) {
    main_amp = std::sqrt(p.extinction_ratio / (p.extinction_ratio + 1.0));
    leak_amp = std::sqrt(1.0 / (p.extinction_ratio + 1.0));
  }
  return map_states(pool, [&](const PhotonState& s,
                              std::vector<PhotonState>& out) {
    if (s.route != p.in_a && s.route != p.in_b) {
      out.push_back(s);
      return;
    }
    const bool from_a = (s.route == p.in_a);
    const double h_base = s.coefficient * s.polarization.alpha * amp_h;
    const double v_base = s.coefficient * s.polarization.beta * amp_v;

    auto emit = [&](RouteId route, double coeff, bool horizontal,
                    double phase) {
      if (std::abs(coeff) < kCoefficientDropEps) return;
      PhotonState t = s;
      t.route = route;
      t.coefficient = coeff;
      t.phase = phase;
      t.polarization = horizontal ? JonesPolarization{1.0, 0.0, 0.0}
                                  : JonesPolarization{0.0, 1.0, 0.0};
      out.push_back(t);
    };

    // The V part's Jones factor exp(-i delta_phase) becomes a plain phase
    // once the state is re-expressed as pure V.
    const double v_phase = s.phase - s.polarization.delta_phase;
    if (from_a) {
      emit(p.out_c, h_base * main_amp, true, s.phase);
      emit(p.out_d, h_base * leak_amp, true, s.phase);
      emit(p.out_d, v_base * main_amp, false, v_phase);
      emit(p.out_c, v_base * leak_amp, false, v_phase);
    } else {
      emit(p.out_d, h_base * main_amp, true, s.phase);
      emit(p.out_c, -h_base * leak_amp, true, s.phase);
      emit(p.out_c, v_base * main_amp, false, v_phase);
      emit(p.out_d, -v_base * leak_amp, false, v_phase);
    }
  });
}

PhotonPool apply_attenuator(const PhotonPool& pool, const AttenuatorParams& p) {
  const double amp = loss_amplitude(p.loss_db);
  return transform_route(pool, p.in, p.out,
                         [&](PhotonState& s) { s.coefficient *= amp; });
}

PhotonPool apply_filter(const PhotonPool& pool, const FilterParams& p) {
  const double in_amp = loss_amplitude(p.in_band_loss_db);
  const double out_amp = loss_amplitude(p.out_of_band_loss_db);
  return transform_route(pool, p.in, p.out, [&](PhotonState& s) {
    const bool in_band =
        s.spectrum.mu >= p.band_lo && s.spectrum.mu <= p.band_hi;
    s.coefficient *= in_band ? in_amp : out_amp;
  });
}

PhotonPool apply_circulator(const PhotonPool& pool, const CirculatorParams& p) {
  const double amp = loss_amplitude(p.loss_db);
  return transform_route(pool, p.in, p.out,
                         [&](PhotonState& s) { s.coefficient *= amp; });
}

PhotonPool apply_polarization_modulator(
    const PhotonPool& pool, const PolarizationModulatorParams& p) {
  fock::validate(p.target);
  const double amp = loss_amplitude(p.loss_db);
  return transform_route(pool, p.in, p.out, [&](PhotonState& s) {
    s.coefficient *= amp;
    s.polarization = p.target;
  });
}

PhotonPool apply_phase_modulator(const PhotonPool& pool,
                                 const PhaseModulatorParams& p) {
  const double amp = loss_amplitude(p.loss_db);
  return transform_route(pool, p.in, p.out, [&](PhotonState& s) {
    s.coefficient *= amp;
    s.phase = p.target_phase;
  });
}

PhotonPool apply_isolator(const PhotonPool& pool, const IsolatorParams& p) {
  const double db = p.forward ? p.loss_db : p.loss_db + p.isolation_db;
  const double amp = loss_amplitude(db);
  return transform_route(pool, p.in, p.out,
                         [&](PhotonState& s) { s.coefficient *= amp; });
}

PhotonPool apply_switch(const PhotonPool& pool, const SwitchParams& p) {
  validate(p);
  const double main_amp = loss_amplitude(p.loss_db);
  const double leak_amp =
      std::isfinite(p.isolation_db)
          ? loss_amplitude(p.loss_db + p.isolation_db)
          : 0.0;
  const RouteId selected = (p.selected_port == 1) ? p.out_1 : p.out_2;
  const RouteId unselected = (p.selected_port == 1) ? p.out_2 : p.out_1;
  return map_states(pool, [&](const PhotonState& s,
                              std::vector<PhotonState>& out) {
    if (s.route != p.in) {
      out.push_back(s);
      return;
    }
    PhotonState main = s;
    main.route = selected;
    main.coefficient = s.coefficient * main_amp;
    if (std::abs(main.coefficient) >= kCoefficientDropEps) out.push_back(main);
    PhotonState leak = s;
    leak.route = unselected;
    leak.coefficient = s.coefficient * leak_amp;
    if (std::abs(leak.coefficient) >= kCoefficientDropEps) out.push_back(leak);
  });
}

PhotonPool apply_waveplate(const PhotonPool& pool, const WaveplateParams& p) {
  const double amp = loss_amplitude(p.loss_db);
  const double c = std::cos(2.0 * p.offset_angle);
  const double s2 = std::sin(2.0 * p.offset_angle);
  const double cd = std::cos(p.relative_phase);
  const double sd = std::sin(p.relative_phase);
  return transform_route(pool, p.in, p.out, [&](PhotonState& st) {
    const double a = st.polarization.alpha;
    const double b = st.polarization.beta;
    const double dth = st.polarization.delta_phase;
    const double s1 = a * a - b * b;
    const double sq = 2.0 * a * b * std::cos(dth);
    const double su = 2.0 * a * b * std::sin(dth);
    // Rotation of the Poincare sphere by `delta` about (cos 2theta, sin 2theta, 0).
    const double s1o = (c * c + s2 * s2 * cd) * s1 +
                       (c * s2 * (1.0 - cd)) * sq + (s2 * sd) * su;
    const double sqo = (c * s2 * (1.0 - cd)) * s1 +
                       (s2 * s2 + c * c * cd) * sq - (c * sd) * su;
    const double suo = -(s2 * sd) * s1 + (c * sd) * sq + cd * su;
    double ao = std::sqrt(std::max(0.0, (1.0 + s1o) / 2.0));
    double bo = std::sqrt(std::max(0.0, (1.0 - s1o) / 2.0));
    normalize_jones(ao, bo);
    const double dtho = (ao * bo < 1e-12) ? 0.0 : std::atan2(suo, sqo);
    st.polarization = {ao, bo, dtho};
    st.coefficient *= amp;
  });
}

PhotonPool apply_fiber(const PhotonPool& pool, const FiberParams& p,
                       RandomStream& rng) {
  validate(p);
  const double amp = loss_amplitude(p.alpha_db_per_km * p.length_km);
  const double added_delay = p.length_km * p.delay_s_per_km;
  const std::uint64_t draws_before = rng.draws();
  auto draw = [&](const Disturbance& d) {
    return d.stddev > 0.0 ? rng.normal(d.mean, d.stddev) : d.mean;
  };
  // One draw per pulse per fiber: every state of the pulse sees the same
  // perturbation (slow drift relative to the pulse width).
  const double d_phase = draw(p.phase);
  const double d_alpha = draw(p.alpha);
  const double d_beta = draw(p.beta);
  const double d_theta = draw(p.theta);

  PhotonPool out = transform_route(pool, p.in, p.out, [&](PhotonState& s) {
    s.coefficient *= amp;
    s.delay += added_delay;
    s.phase += d_phase;
    double a = s.polarization.alpha + d_alpha;
    double b = s.polarization.beta + d_beta;
    normalize_jones(a, b);
    s.polarization = {a, b, s.polarization.delta_phase + d_theta};
  });
  out.record_draws(rng.key(), rng.draws() - draws_before);
  return out;
}

PhotonPool apply_faraday_mirror(const PhotonPool& pool,
                                const FaradayMirrorParams& p) {
  const double amp = loss_amplitude(p.loss_db);
  const double c2 = std::cos(2.0 * p.theta);
  const double s2 = std::sin(2.0 * p.theta);
  return transform_route(pool, p.in, p.out, [&](PhotonState& s) {
    const std::complex<double> jh(s.polarization.alpha, 0.0);
    const std::complex<double> jv =
        s.polarization.beta *
        std::exp(std::complex<double>(0.0, -s.polarization.delta_phase));
    const std::complex<double> oh = c2 * jh - s2 * jv;
    const std::complex<double> ov = -s2 * jh - c2 * jv;
    double ao = std::abs(oh);
    double bo = std::abs(ov);
    double g = 0.0;
    double dtho = 0.0;
    if (ao >= 1e-12) {
      g = std::arg(oh);
      dtho = (bo >= 1e-12) ? wrap_angle(g - std::arg(ov)) : 0.0;
    } else if (bo >= 1e-12) {
      g = std::arg(ov);
      ao = 0.0;
    }
    normalize_jones(ao, bo);
    s.polarization = {ao, bo, dtho};
    s.phase += g;
    s.coefficient *= amp;
  });
}

PhotonPool apply_simple_device(const PhotonPool& pool,
                               const SimpleDeviceParams& device) {
  return std::visit(
      [&](const auto& p) -> PhotonPool {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, AttenuatorParams>) {
          return apply_attenuator(pool, p);
        } else if constexpr (std::is_same_v<T, FilterParams>) {
          return apply_filter(pool, p);
        } else if constexpr (std::is_same_v<T, CirculatorParams>) {
          return apply_circulator(pool, p);
        } else if constexpr (std::is_same_v<T, PolarizationModulatorParams>) {
          return apply_polarization_modulator(pool, p);
        } else if constexpr (std::is_same_v<T, PhaseModulatorParams>) {
          return apply_phase_modulator(pool, p);
        } else if constexpr (std::is_same_v<T, IsolatorParams>) {
          return apply_isolator(pool, p);
        } else {
          return apply_switch(pool, p);
        }
      },
      device);
}

}  // namespace focksim::components
