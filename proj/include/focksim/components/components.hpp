#pragma once
#include <limits>
#include <numbers>
#include <variant>

#include "focksim/fock/state.hpp"
#include "focksim/rng.hpp"

namespace focksim::components {

/// Amplitude factor of an intensity loss given in dB.
double loss_amplitude(double loss_db);

// ---------------------------------------------------------------------------
// Path-splitting devices

struct BsParams {
  double ratio_t = 0.5;  // transmittance T
  double ratio_r = 0.5;  // reflectance R, T + R = 1
  double loss_db = 0.0;
  fock::RouteId in_a, in_b, out_c, out_d;
};

struct PbsParams {
  double loss_h_db = 0.0;
  double loss_v_db = 0.0;
  // R_E, linear; infinity models the ideal device (zero leakage amplitude)
  double extinction_ratio = std::numeric_limits<double>::infinity();
  fock::RouteId in_a, in_b, out_c, out_d;  // c: H main port, d: V main port
};

void validate(const BsParams& p);
void validate(const PbsParams& p);

/// Beamsplitter, lossy form. Input a maps to (sqrt(L T), c) and
/// (-sqrt(L R), d); input b maps to (sqrt(L R), c) and (sqrt(L T), d),
/// L = 10^(-loss/10). The reflection signs make the map unitary for any
/// splitting ratio and reduce to the usual 50/50 convention at T = R.
fock::PhotonPool apply_bs(const fock::PhotonPool& pool, const BsParams& p);

/// Polarizing beamsplitter with finite extinction. H from input a exits
/// mainly at c with amplitude sqrt(R_E/(R_E+1)) and leaks to d with
/// sqrt(1/(R_E+1)); V mirrors to d. Outputs are re-expressed as pure H / V
/// states, with the V component's Jones phase folded into the state phase.
/// Leakage carries alternating signs so the zero-loss device is unitary at
/// every R_E.
fock::PhotonPool apply_pbs(const fock::PhotonPool& pool, const PbsParams& p);

// ---------------------------------------------------------------------------
// Single-path devices

struct AttenuatorParams {
  double loss_db = 0.0;
  fock::RouteId in, out;
};

struct FilterParams {
  double in_band_loss_db = 0.0;
  double out_of_band_loss_db = 40.0;
  double band_lo = 0.0;      // rad/s, inclusive
  double band_hi = 1e18;     // rad/s, inclusive
  fock::RouteId in, out;
};

struct CirculatorParams {
  double loss_db = 0.0;
  fock::RouteId in, out;  // resolved per traversal by the engine's port cycle
};

struct PolarizationModulatorParams {
  fock::JonesPolarization target{};
  double loss_db = 0.0;
  fock::RouteId in, out;
};

struct PhaseModulatorParams {
  double target_phase = 0.0;  // rad
  double loss_db = 0.0;
  fock::RouteId in, out;
};

struct IsolatorParams {
  double loss_db = 0.0;
  double isolation_db = 60.0;
  fock::RouteId in, out;
  bool forward = true;  // resolved per traversal
};

struct SwitchParams {
  double loss_db = 0.0;
  double isolation_db = 60.0;
  int selected_port = 1;  // 1 or 2
  fock::RouteId in, out_1, out_2;
};

struct WaveplateParams {
  double relative_phase = 0.0;  // delta, rad; pi = half-wave
  double offset_angle = 0.0;    // fast axis theta, rad
  double loss_db = 0.0;
  fock::RouteId in, out;
};

struct Disturbance {
  double mean = 0.0;
  double stddev = 0.0;
};

struct FiberParams {
  double alpha_db_per_km = 0.0;
  double length_km = 0.0;
  double delay_s_per_km = 4.9e-6;
  Disturbance phase{}, alpha{}, beta{}, theta{};
  fock::RouteId in, out;
};

struct FaradayMirrorParams {
  double loss_db = 0.0;
  double theta = std::numbers::pi / 4;  // single-pass Faraday rotation
  fock::RouteId in, out;
};

void validate(const FiberParams& p);
void validate(const SwitchParams& p);

fock::PhotonPool apply_attenuator(const fock::PhotonPool&, const AttenuatorParams&);
fock::PhotonPool apply_filter(const fock::PhotonPool&, const FilterParams&);
fock::PhotonPool apply_circulator(const fock::PhotonPool&, const CirculatorParams&);
fock::PhotonPool apply_polarization_modulator(const fock::PhotonPool&,
                                              const PolarizationModulatorParams&);
fock::PhotonPool apply_phase_modulator(const fock::PhotonPool&,
                                       const PhaseModulatorParams&);
/// Forward pass costs the insertion loss; the reverse pass additionally pays
/// the isolation.
fock::PhotonPool apply_isolator(const fock::PhotonPool&, const IsolatorParams&);
/// The selected port receives the signal at insertion loss; the unselected
/// port receives leakage attenuated by the isolation on top.
fock::PhotonPool apply_switch(const fock::PhotonPool&, const SwitchParams&);

/// Stokes-Mueller retarder. The polarization triple is mapped through the
/// rotation M(theta, delta) of the Poincare sphere, then recovered with
/// alpha_o = sqrt((1+S1)/2), beta_o = sqrt((1-S1)/2),
/// delta_theta_o = atan2(S3, S2).
fock::PhotonPool apply_waveplate(const fock::PhotonPool&, const WaveplateParams&);

/// Fiber span: distributed loss, propagation delay, and one shared
/// random-walk draw per pulse on each of (phase, alpha, beta, theta).
/// A polarization-maintaining fiber is the special case of zero mean and
/// stddev on the polarization parameters.
fock::PhotonPool apply_fiber(const fock::PhotonPool&, const FiberParams&,
                             RandomStream& rng);

/// Faraday rotator plus mirror: Jones map
/// [[cos 2t, -sin 2t], [-sin 2t, -cos 2t]]; the output global phase is
/// folded into the state phase and the route reverses by wiring.
fock::PhotonPool apply_faraday_mirror(const fock::PhotonPool&,
                                      const FaradayMirrorParams&);

using SimpleDeviceParams =
    std::variant<AttenuatorParams, FilterParams, CirculatorParams,
                 PolarizationModulatorParams, PhaseModulatorParams,
                 IsolatorParams, SwitchParams>;

/// Dispatch over the non-splitting device table.
fock::PhotonPool apply_simple_device(const fock::PhotonPool&,
                                     const SimpleDeviceParams&);

}  // namespace focksim::components
