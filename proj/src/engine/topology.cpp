#include "focksim/engine/topology.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "focksim/errors.hpp"
#include "focksim/units.hpp"
#include "json.hpp"

namespace focksim::engine {

using nlohmann::json;

const char* device_kind_name(DeviceKind k) {
  switch (k) {
    case DeviceKind::kBs: return "bs";
    case DeviceKind::kPbs: return "pbs";
    case DeviceKind::kAttenuator: return "attenuator";
    case DeviceKind::kFilter: return "filter";
    case DeviceKind::kCirculator: return "circulator";
    case DeviceKind::kPolarizationModulator: return "polarization_modulator";
    case DeviceKind::kPhaseModulator: return "phase_modulator";
    case DeviceKind::kIsolator: return "isolator";
    case DeviceKind::kSwitch: return "switch_1x2";
    case DeviceKind::kWaveplate: return "waveplate";
    case DeviceKind::kFiber: return "fiber";
    case DeviceKind::kFaradayMirror: return "faraday_mirror";
  }
  return "?";
}

int DeviceNode::port_index(const std::string& port_name) const {
  for (std::size_t i = 0; i < ports.size(); ++i) {
    if (ports[i].name == port_name) return static_cast<int>(i);
  }
  return -1;
}

int Topology::detector_index(const std::string& name) const {
  for (std::size_t i = 0; i < detectors.size(); ++i) {
    if (detectors[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

namespace {

void check_keys(const json& obj, const std::set<std::string>& allowed,
                const std::string& path) {
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key)) {
      throw ConfigError(path + "/" + key + ": unknown key");
    }
  }
}

double get_quantity(const json& obj, const char* key, UnitKind kind,
                    const std::string& path,
                    std::optional<double> fallback = std::nullopt) {
  if (!obj.contains(key)) {
    if (fallback) return *fallback;
    throw ConfigError(path + ": missing required key '" + key + "'");
  }
  const json& v = obj.at(key);
  const std::string where = path + "/" + key;
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) return parse_quantity(v.get<std::string>(), kind, where);
  throw ConfigError(where + ": expected a number or a quantity string");
}

bool get_bool(const json& obj, const char* key, const std::string& path,
              bool fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_boolean()) throw ConfigError(path + "/" + key + ": expected bool");
  return v.get<bool>();
}

std::int64_t get_int(const json& obj, const char* key, const std::string& path,
                     std::optional<std::int64_t> fallback = std::nullopt) {
  if (!obj.contains(key)) {
    if (fallback) return *fallback;
    throw ConfigError(path + ": missing required key '" + key + "'");
  }
  const json& v = obj.at(key);
  if (!v.is_number_integer()) {
    throw ConfigError(path + "/" + key + ": expected an integer");
  }
  return v.get<std::int64_t>();
}

std::string get_string(const json& obj, const char* key,
                       const std::string& path) {
  if (!obj.contains(key)) {
    throw ConfigError(path + ": missing required key '" + key + "'");
  }
  if (!obj.at(key).is_string()) {
    throw ConfigError(path + "/" + key + ": expected a string");
  }
  return obj.at(key).get<std::string>();
}

fock::JonesPolarization parse_polarization(const json& obj,
                                           const std::string& path) {
  check_keys(obj, {"alpha", "beta", "delta_phase"}, path);
  fock::JonesPolarization p;
  p.alpha = get_quantity(obj, "alpha", UnitKind::kDimensionless, path, 1.0);
  p.beta = get_quantity(obj, "beta", UnitKind::kDimensionless, path, 0.0);
  p.delta_phase = get_quantity(obj, "delta_phase", UnitKind::kAngle, path, 0.0);
  try {
    fock::validate(p);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return p;
}

std::vector<Port> make_ports(DeviceKind kind,
                             const std::vector<std::string>& circulator_ports) {
  auto in = [](const char* n) { return Port{n, true, false, -1, -1}; };
  auto out = [](const char* n) { return Port{n, false, true, -1, -1}; };
  auto both = [](const std::string& n) { return Port{n, true, true, -1, -1}; };
  switch (kind) {
    case DeviceKind::kBs:
    case DeviceKind::kPbs:
      return {in("in_a"), in("in_b"), out("out_c"), out("out_d")};
    case DeviceKind::kSwitch:
      return {in("in"), out("out_1"), out("out_2")};
    case DeviceKind::kCirculator: {
      std::vector<Port> ports;
      for (const std::string& n : circulator_ports) ports.push_back(both(n));
      return ports;
    }
    case DeviceKind::kFaradayMirror:
      return {both("io")};
    default:
      return {both("a"), both("b")};
  }
}

components::Disturbance parse_disturbance(const json& obj, const char* key,
                                          UnitKind kind,
                                          const std::string& path) {
  if (!obj.contains(key)) return {};
  const json& v = obj.at(key);
  const std::string where = path + "/" + key;
  check_keys(v, {"mean", "stddev"}, where);
  components::Disturbance d;
  d.mean = get_quantity(v, "mean", kind, where, 0.0);
  d.stddev = get_quantity(v, "stddev", kind, where, 0.0);
  return d;
}

DeviceNode parse_device(const json& obj, const std::string& path) {
  DeviceNode node;
  node.name = get_string(obj, "name", path);
  const std::string kind = get_string(obj, "kind", path);
  std::vector<std::string> circ_ports = {"p1", "p2", "p3"};

  if (kind == "bs") {
    check_keys(obj, {"name", "kind", "ratio_t", "ratio_r", "loss"}, path);
    components::BsParams p;
    p.ratio_t = get_quantity(obj, "ratio_t", UnitKind::kDimensionless, path, 0.5);
    p.ratio_r = get_quantity(obj, "ratio_r", UnitKind::kDimensionless, path,
                             1.0 - p.ratio_t);
    p.loss_db = get_quantity(obj, "loss", UnitKind::kLossDb, path, 0.0);
    node.kind = DeviceKind::kBs;
    node.params = p;
  } else if (kind == "pbs") {
    check_keys(obj, {"name", "kind", "loss_h", "loss_v", "extinction_ratio"},
               path);
    components::PbsParams p;
    p.loss_h_db = get_quantity(obj, "loss_h", UnitKind::kLossDb, path, 0.0);
    p.loss_v_db = get_quantity(obj, "loss_v", UnitKind::kLossDb, path, 0.0);
    if (obj.contains("extinction_ratio")) {
      p.extinction_ratio =
          get_quantity(obj, "extinction_ratio", UnitKind::kDimensionless, path);
    }
    node.kind = DeviceKind::kPbs;
    node.params = p;
  } else if (kind == "attenuator") {
    check_keys(obj, {"name", "kind", "loss"}, path);
    components::AttenuatorParams p;
    p.loss_db = get_quantity(obj, "loss", UnitKind::kLossDb, path, 0.0);
    node.kind = DeviceKind::kAttenuator;
    node.params = p;
  } else if (kind == "filter") {
    check_keys(obj,
               {"name", "kind", "in_band_loss", "out_of_band_loss", "band_lo",
                "band_hi"},
               path);
    components::FilterParams p;
    p.in_band_loss_db =
        get_quantity(obj, "in_band_loss", UnitKind::kLossDb, path, 0.0);
    p.out_of_band_loss_db =
        get_quantity(obj, "out_of_band_loss", UnitKind::kLossDb, path, 40.0);
    p.band_lo = get_quantity(obj, "band_lo", UnitKind::kAngularFrequency, path, 0.0);
    p.band_hi = get_quantity(obj, "band_hi", UnitKind::kAngularFrequency, path, 1e18);
    node.kind = DeviceKind::kFilter;
    node.params = p;
  } else if (kind == "circulator") {
    check_keys(obj, {"name", "kind", "loss", "ports"}, path);
    components::CirculatorParams p;
    p.loss_db = get_quantity(obj, "loss", UnitKind::kLossDb, path, 0.0);
    if (obj.contains("ports")) {
      circ_ports.clear();
      for (const auto& v : obj.at("ports")) {
        circ_ports.push_back(v.get<std::string>());
      }
      if (circ_ports.size() < 2) {
        throw ConfigError(path + "/ports: need at least two ports");
      }
    }
    node.kind = DeviceKind::kCirculator;
    node.params = p;
  } else if (kind == "polarization_modulator") {
    check_keys(obj, {"name", "kind", "alpha", "beta", "delta_phase", "loss"},
               path);
    components::PolarizationModulatorParams p;
    p.target.alpha = get_quantity(obj, "alpha", UnitKind::kDimensionless, path, 1.0);
    p.target.beta = get_quantity(obj, "beta", UnitKind::kDimensionless, path, 0.0);
    p.target.delta_phase =
        get_quantity(obj, "delta_phase", UnitKind::kAngle, path, 0.0);
    p.loss_db = get_quantity(obj, "loss", UnitKind::kLossDb, path, 0.0);
    node.kind = DeviceKind::kPolarizationModulator;
    node.params = p;
  } else if (kind == "phase_modulator") {
    check_keys(obj, {"name", "kind", "phase", "loss"}, path);
    components::PhaseModulatorParams p;
    p.target_phase = get_quantity(obj, "phase", UnitKind::kAngle, path, 0.0);
    p.loss_db = get_quantity(obj, "loss", UnitKind::kLossDb, path, 0.0);
    node.kind = DeviceKind::kPhaseModulator;
    node.params = p;
  } else if (kind == "isolator") {
    check_keys(obj, {"name", "kind", "loss", "isolation"}, path);
    components::IsolatorParams p;
    p.loss_db = get_quantity(obj, "loss", UnitKind::kLossDb, path, 0.0);
    p.isolation_db = get_quantity(obj, "isolation", UnitKind::kLossDb, path, 60.0);
    node.kind = DeviceKind::kIsolator;
    node.params = p;
  } else if (kind == "switch_1x2") {
    check_keys(obj, {"name", "kind", "loss", "isolation", "selected_port"}, path);
    components::SwitchParams p;
    p.loss_db = get_quantity(obj, "loss", UnitKind::kLossDb, path, 0.0);
    p.isolation_db = get_quantity(obj, "isolation", UnitKind::kLossDb, path, 60.0);
    p.selected_port = static_cast<int>(get_int(obj, "selected_port", path, 1));
    node.kind = DeviceKind::kSwitch;
    node.params = p;
  } else if (kind == "waveplate") {
    check_keys(obj, {"name", "kind", "relative_phase", "offset_angle", "loss"},
               path);
    components::WaveplateParams p;
    p.relative_phase =
        get_quantity(obj, "relative_phase", UnitKind::kAngle, path, 0.0);
    p.offset_angle = get_quantity(obj, "offset_angle", UnitKind::kAngle, path, 0.0);
    p.loss_db = get_quantity(obj, "loss", UnitKind::kLossDb, path, 0.0);
    node.kind = DeviceKind::kWaveplate;
    node.params = p;
  } else if (kind == "fiber") {
    check_keys(obj,
               {"name", "kind", "attenuation", "length", "delay", "disturbance"},
               path);
    components::FiberParams p;
    p.alpha_db_per_km =
        get_quantity(obj, "attenuation", UnitKind::kLossDbPerKm, path, 0.0);
    p.length_km = get_quantity(obj, "length", UnitKind::kLengthKm, path, 0.0);
    p.delay_s_per_km = get_quantity(obj, "delay", UnitKind::kTimePerKm, path, 4.9e-6);
    if (obj.contains("disturbance")) {
      const json& d = obj.at("disturbance");
      const std::string dpath = path + "/disturbance";
      check_keys(d, {"phase", "alpha", "beta", "theta"}, dpath);
      p.phase = parse_disturbance(d, "phase", UnitKind::kAngle, dpath);
      p.alpha = parse_disturbance(d, "alpha", UnitKind::kDimensionless, dpath);
      p.beta = parse_disturbance(d, "beta", UnitKind::kDimensionless, dpath);
      p.theta = parse_disturbance(d, "theta", UnitKind::kAngle, dpath);
    }
    node.kind = DeviceKind::kFiber;
    node.params = p;
  } else if (kind == "faraday_mirror") {
    check_keys(obj, {"name", "kind", "loss", "theta"}, path);
    components::FaradayMirrorParams p;
    p.loss_db = get_quantity(obj, "loss", UnitKind::kLossDb, path, 0.0);
    p.theta = get_quantity(obj, "theta", UnitKind::kAngle, path,
                           std::numbers::pi / 4);
    node.kind = DeviceKind::kFaradayMirror;
    node.params = p;
  } else {
    throw ConfigError(path + "/kind: unknown device kind '" + kind + "'");
  }

  node.ports = make_ports(node.kind, circ_ports);
  return node;
}

struct EndpointRef {
  Endpoint ep;
  Port* port = nullptr;  // resolved port record (device ports only)
};

}  // namespace

Topology load_topology(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("netlist: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("netlist: top level must be an object");
  check_keys(root,
             {"clock_period", "photon_cap", "sources", "devices", "detectors",
              "links", "experiment"},
             "netlist");

  Topology topo;
  topo.clock_period =
      get_quantity(root, "clock_period", UnitKind::kTime, "netlist", 1e-7);
  topo.photon_cap = static_cast<int>(get_int(root, "photon_cap", "netlist", 8));

  std::set<std::string> names;
  auto claim_name = [&](const std::string& n, const std::string& path) {
    if (!names.insert(n).second) {
      throw ConfigError(path + ": duplicate node name '" + n + "'");
    }
  };

  if (root.contains("sources")) {
    int i = 0;
    for (const json& s : root.at("sources")) {
      const std::string path = "netlist/sources/" + std::to_string(i++);
      check_keys(s,
                 {"name", "kind", "mu", "spectral_mu", "spectral_sigma",
                  "polarization", "delay", "phase", "phase_randomized",
                  "repetition_period", "emit_offset", "truncation"},
                 path);
      SourceNode node;
      node.name = get_string(s, "name", path);
      claim_name(node.name, path);
      const std::string kind = get_string(s, "kind", path);
      if (kind == "single_photon") {
        node.single_photon = true;
      } else if (kind == "weak_coherent") {
        node.single_photon = false;
      } else {
        throw ConfigError(path + "/kind: unknown source kind '" + kind + "'");
      }
      node.params.mean_photon_number =
          get_quantity(s, "mu", UnitKind::kDimensionless, path, 0.0);
      node.params.spectrum.mu = get_quantity(
          s, "spectral_mu", UnitKind::kAngularFrequency, path, 1.2153e15);
      node.params.spectrum.sigma = get_quantity(
          s, "spectral_sigma", UnitKind::kAngularFrequency, path, 4.0841e11);
      if (s.contains("polarization")) {
        node.params.polarization =
            parse_polarization(s.at("polarization"), path + "/polarization");
      }
      node.params.delay = get_quantity(s, "delay", UnitKind::kTime, path, 0.0);
      node.params.phase = get_quantity(s, "phase", UnitKind::kAngle, path, 0.0);
      node.params.phase_randomized =
          get_bool(s, "phase_randomized", path, !node.single_photon);
      node.params.repetition_period = get_quantity(
          s, "repetition_period", UnitKind::kTime, path, topo.clock_period);
      node.emit_offset = get_quantity(s, "emit_offset", UnitKind::kTime, path, 0.0);
      if (!node.single_photon) {
        std::uint64_t trunc_trials = 1000000;
        double trunc_eps = 1e-10;
        if (s.contains("truncation")) {
          const json& t = s.at("truncation");
          check_keys(t, {"trials", "epsilon"}, path + "/truncation");
          trunc_trials = static_cast<std::uint64_t>(
              get_int(t, "trials", path + "/truncation", 1000000));
          trunc_eps = get_quantity(t, "epsilon", UnitKind::kDimensionless,
                                   path + "/truncation", 1e-10);
        }
        if (node.params.mean_photon_number > 0.0) {
          node.truncation_nt = sources::truncation_point(
              node.params.mean_photon_number, trunc_trials, trunc_eps);
        }
      }
      try {
        sources::validate(node.params);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(path + ": " + e.what());
      }
      topo.sources.push_back(std::move(node));
    }
  }

  if (root.contains("devices")) {
    int i = 0;
    for (const json& d : root.at("devices")) {
      const std::string path = "netlist/devices/" + std::to_string(i++);
      DeviceNode node = parse_device(d, path);
      claim_name(node.name, path);
      topo.devices.push_back(std::move(node));
    }
  }

  if (root.contains("detectors")) {
    int i = 0;
    for (const json& d : root.at("detectors")) {
      const std::string path = "netlist/detectors/" + std::to_string(i++);
      check_keys(d,
                 {"name", "efficiency", "dark_count_rate", "afterpulse",
                  "jitter", "resolves_photon_number", "enabled", "gate_width",
                  "gate_offset"},
                 path);
      DetectorNode node;
      node.name = get_string(d, "name", path);
      claim_name(node.name, path);
      node.params.efficiency =
          get_quantity(d, "efficiency", UnitKind::kDimensionless, path, 1.0);
      node.params.dark_count_rate =
          get_quantity(d, "dark_count_rate", UnitKind::kRate, path, 0.0);
      node.params.afterpulse_prob =
          get_quantity(d, "afterpulse", UnitKind::kDimensionless, path, 0.0);
      node.params.timing_jitter =
          get_quantity(d, "jitter", UnitKind::kTime, path, 0.0);
      node.params.resolves_photon_number =
          get_bool(d, "resolves_photon_number", path, false);
      node.params.enabled = get_bool(d, "enabled", path, true);
      node.params.gate_width =
          get_quantity(d, "gate_width", UnitKind::kTime, path, topo.clock_period);
      node.gate_offset = get_quantity(d, "gate_offset", UnitKind::kTime, path, 0.0);
      try {
        detector::validate(node.params);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(path + ": " + e.what());
      }
      topo.detectors.push_back(std::move(node));
    }
  }

  // Link resolution: each link becomes one route.
  auto resolve = [&](const std::string& ref, bool producing,
                     const std::string& path) -> EndpointRef {
    const auto dot = ref.find('.');
    if (dot == std::string::npos) {
      throw ConfigError(path + ": endpoint '" + ref + "' must be 'node.port'");
    }
    const std::string node_name = ref.substr(0, dot);
    const std::string port_name = ref.substr(dot + 1);
    for (std::size_t i = 0; i < topo.sources.size(); ++i) {
      if (topo.sources[i].name != node_name) continue;
      if (port_name != "out" || !producing) {
        throw ConfigError(path + ": source '" + node_name +
                          "' only produces on port 'out'");
      }
      return {{Endpoint::kSource, static_cast<int>(i), 0}, nullptr};
    }
    for (std::size_t i = 0; i < topo.devices.size(); ++i) {
      if (topo.devices[i].name != node_name) continue;
      const int p = topo.devices[i].port_index(port_name);
      if (p < 0) {
        throw ConfigError(path + ": device '" + node_name + "' has no port '" +
                          port_name + "'");
      }
      Port& port = topo.devices[i].ports[p];
      if (producing && !port.can_produce) {
        throw ConfigError(path + ": port '" + ref + "' cannot produce");
      }
      if (!producing && !port.can_consume) {
        throw ConfigError(path + ": port '" + ref + "' cannot consume");
      }
      return {{Endpoint::kDevice, static_cast<int>(i), p}, &port};
    }
    for (std::size_t i = 0; i < topo.detectors.size(); ++i) {
      if (topo.detectors[i].name != node_name) continue;
      if (port_name != "in" || producing) {
        throw ConfigError(path + ": detector '" + node_name +
                          "' only consumes on port 'in'");
      }
      return {{Endpoint::kDetector, static_cast<int>(i), 0}, nullptr};
    }
    throw ConfigError(path + ": unknown node '" + node_name + "'");
  };

  if (root.contains("links")) {
    int i = 0;
    for (const json& l : root.at("links")) {
      const std::string path = "netlist/links/" + std::to_string(i++);
      check_keys(l, {"from", "to"}, path);
      EndpointRef from = resolve(get_string(l, "from", path), true, path);
      EndpointRef to = resolve(get_string(l, "to", path), false, path);
      const int route = static_cast<int>(topo.routes.size());
      // one producer per route; one route per producing port
      if (from.ep.kind == Endpoint::kSource) {
        if (topo.sources[from.ep.node].out_route >= 0) {
          throw TopologyError(path + ": source '" +
                              topo.sources[from.ep.node].name +
                              "' already produces a route");
        }
        topo.sources[from.ep.node].out_route = route;
      } else {
        if (from.port->out_route >= 0) {
          throw TopologyError(path + ": port already produces a route");
        }
        from.port->out_route = route;
      }
      if (to.ep.kind == Endpoint::kDetector) {
        if (topo.detectors[to.ep.node].in_route >= 0) {
          throw TopologyError(path + ": detector '" +
                              topo.detectors[to.ep.node].name +
                              "' already consumes a route");
        }
        topo.detectors[to.ep.node].in_route = route;
      } else {
        if (to.port->in_route >= 0) {
          throw TopologyError(path + ": port already consumes a route");
        }
        to.port->in_route = route;
      }
      topo.routes.push_back({from.ep, to.ep});
    }
  }

  // Unlinked producing ports get sink routes so nothing is silently lost;
  // pools that end up there are reported as undetected.
  for (std::size_t d = 0; d < topo.devices.size(); ++d) {
    for (std::size_t p = 0; p < topo.devices[d].ports.size(); ++p) {
      Port& port = topo.devices[d].ports[p];
      if (port.can_produce && port.out_route < 0) {
        port.out_route = static_cast<int>(topo.routes.size());
        topo.routes.push_back(
            {{Endpoint::kDevice, static_cast<int>(d), static_cast<int>(p)},
             std::nullopt});
      }
    }
  }

  if (root.contains("experiment")) {
    const json& e = root.at("experiment");
    const std::string path = "netlist/experiment";
    check_keys(e, {"mode", "trials", "sweep", "coincidence"}, path);
    if (e.contains("mode")) {
      const std::string mode = get_string(e, "mode", path);
      if (mode == "analytic") {
        topo.experiment.analytic = true;
      } else if (mode != "monte_carlo") {
        throw ConfigError(path + "/mode: expected monte_carlo or analytic");
      }
    }
    topo.experiment.trials =
        static_cast<std::uint64_t>(get_int(e, "trials", path, 0));
    if (e.contains("sweep")) {
      const json& s = e.at("sweep");
      const std::string spath = path + "/sweep";
      check_keys(s, {"parameter", "start", "end", "points", "unit"}, spath);
      SweepSpec sweep;
      sweep.parameter = get_string(s, "parameter", spath);
      UnitKind unit = UnitKind::kDimensionless;
      if (s.contains("unit")) {
        const std::string u = get_string(s, "unit", spath);
        if (u == "rad") unit = UnitKind::kAngle;
        else if (u == "s") unit = UnitKind::kTime;
        else if (u == "dB") unit = UnitKind::kLossDb;
        else if (u == "km") unit = UnitKind::kLengthKm;
        else if (u == "") unit = UnitKind::kDimensionless;
        else throw ConfigError(spath + "/unit: unknown unit family '" + u + "'");
      }
      sweep.start = get_quantity(s, "start", unit, spath);
      sweep.end = get_quantity(s, "end", unit, spath);
      sweep.points = static_cast<int>(get_int(s, "points", spath, 1));
      if (sweep.points < 1) throw ConfigError(spath + "/points: must be >= 1");
      topo.experiment.sweep = sweep;
    }
    if (e.contains("coincidence")) {
      for (const json& pair : e.at("coincidence")) {
        if (!pair.is_array() || pair.size() != 2) {
          throw ConfigError(path + "/coincidence: expected pairs of names");
        }
        const std::string a = pair.at(0).get<std::string>();
        const std::string b = pair.at(1).get<std::string>();
        if (topo.detector_index(a) < 0 || topo.detector_index(b) < 0) {
          throw ConfigError(path + "/coincidence: unknown detector in pair [" +
                            a + ", " + b + "]");
        }
        topo.experiment.coincidence_pairs.emplace_back(a, b);
      }
    }
  }

  // Zero-delay cycle check: traversal edges between routes, delay > 0 only
  // through fiber. The subgraph of zero-delay edges must be acyclic.
  {
    const int n_routes = static_cast<int>(topo.routes.size());
    std::vector<std::vector<int>> zero_edges(n_routes);
    for (const DeviceNode& dev : topo.devices) {
      double delay = 0.0;
      if (dev.kind == DeviceKind::kFiber) {
        const auto& f = std::get<components::FiberParams>(dev.params);
        delay = f.length_km * f.delay_s_per_km;
      }
      if (delay > 0.0) continue;
      auto add_edge = [&](int from_port, int to_port) {
        const int in = dev.ports[from_port].in_route;
        const int out = dev.ports[to_port].out_route;
        if (in >= 0 && out >= 0) zero_edges[in].push_back(out);
      };
      switch (dev.kind) {
        case DeviceKind::kBs:
        case DeviceKind::kPbs:
          for (int in : {0, 1})
            for (int out : {2, 3}) add_edge(in, out);
          break;
        case DeviceKind::kSwitch:
          add_edge(0, 1);
          add_edge(0, 2);
          break;
        case DeviceKind::kCirculator: {
          const int n = static_cast<int>(dev.ports.size());
          for (int p = 0; p < n; ++p) add_edge(p, (p + 1) % n);
          break;
        }
        case DeviceKind::kFaradayMirror:
          add_edge(0, 0);
          break;
        default:
          add_edge(0, 1);
          add_edge(1, 0);
          break;
      }
    }
    std::vector<int> color(n_routes, 0);  // 0 new, 1 active, 2 done
    std::vector<int> stack;
    for (int start = 0; start < n_routes; ++start) {
      if (color[start]) continue;
      stack.push_back(start);
      std::vector<std::pair<int, std::size_t>> dfs{{start, 0}};
      color[start] = 1;
      while (!dfs.empty()) {
        auto& [r, idx] = dfs.back();
        if (idx < zero_edges[r].size()) {
          const int next = zero_edges[r][idx++];
          if (color[next] == 1) {
            throw TopologyError("netlist: zero-delay cycle through route " +
                                std::to_string(next));
          }
          if (color[next] == 0) {
            color[next] = 1;
            dfs.push_back({next, 0});
          }
        } else {
          color[r] = 2;
          dfs.pop_back();
        }
      }
    }
  }

  return topo;
}

Topology load_topology_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return load_topology(ss.str());
}

namespace {

json polarization_to_json(const fock::JonesPolarization& p) {
  return json{{"alpha", p.alpha}, {"beta", p.beta}, {"delta_phase", p.delta_phase}};
}

json device_to_json(const DeviceNode& d) {
  json j{{"name", d.name}, {"kind", device_kind_name(d.kind)}};
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, components::BsParams>) {
          j["ratio_t"] = p.ratio_t;
          j["ratio_r"] = p.ratio_r;
          j["loss"] = p.loss_db;
        } else if constexpr (std::is_same_v<T, components::PbsParams>) {
          j["loss_h"] = p.loss_h_db;
          j["loss_v"] = p.loss_v_db;
          if (std::isfinite(p.extinction_ratio)) {
            j["extinction_ratio"] = p.extinction_ratio;
          }
        } else if constexpr (std::is_same_v<T, components::AttenuatorParams>) {
          j["loss"] = p.loss_db;
        } else if constexpr (std::is_same_v<T, components::FilterParams>) {
          j["in_band_loss"] = p.in_band_loss_db;
          j["out_of_band_loss"] = p.out_of_band_loss_db;
          j["band_lo"] = p.band_lo;
          j["band_hi"] = p.band_hi;
        } else if constexpr (std::is_same_v<T, components::CirculatorParams>) {
          j["loss"] = p.loss_db;
        } else if constexpr (std::is_same_v<
                                 T, components::PolarizationModulatorParams>) {
          j["alpha"] = p.target.alpha;
          j["beta"] = p.target.beta;
          j["delta_phase"] = p.target.delta_phase;
          j["loss"] = p.loss_db;
        } else if constexpr (std::is_same_v<T,
                                            components::PhaseModulatorParams>) {
          j["phase"] = p.target_phase;
          j["loss"] = p.loss_db;
        } else if constexpr (std::is_same_v<T, components::IsolatorParams>) {
          j["loss"] = p.loss_db;
          j["isolation"] = p.isolation_db;
        } else if constexpr (std::is_same_v<T, components::SwitchParams>) {
          j["loss"] = p.loss_db;
          j["isolation"] = p.isolation_db;
          j["selected_port"] = p.selected_port;
        } else if constexpr (std::is_same_v<T, components::WaveplateParams>) {
          j["relative_phase"] = p.relative_phase;
          j["offset_angle"] = p.offset_angle;
          j["loss"] = p.loss_db;
        } else if constexpr (std::is_same_v<T, components::FiberParams>) {
          j["attenuation"] = p.alpha_db_per_km;
          j["length"] = p.length_km;
          j["delay"] = p.delay_s_per_km;
          j["disturbance"] = json{
              {"phase", {{"mean", p.phase.mean}, {"stddev", p.phase.stddev}}},
              {"alpha", {{"mean", p.alpha.mean}, {"stddev", p.alpha.stddev}}},
              {"beta", {{"mean", p.beta.mean}, {"stddev", p.beta.stddev}}},
              {"theta", {{"mean", p.theta.mean}, {"stddev", p.theta.stddev}}}};
        } else if constexpr (std::is_same_v<T, components::FaradayMirrorParams>) {
          j["loss"] = p.loss_db;
          j["theta"] = p.theta;
        }
      },
      d.params);
  return j;
}

std::string endpoint_name(const Topology& topo, const Endpoint& ep) {
  switch (ep.kind) {
    case Endpoint::kSource: return topo.sources[ep.node].name + ".out";
    case Endpoint::kDetector: return topo.detectors[ep.node].name + ".in";
    case Endpoint::kDevice:
      return topo.devices[ep.node].name + "." +
             topo.devices[ep.node].ports[ep.port].name;
  }
  return "?";
}

}  // namespace

std::string topology_to_json(const Topology& topo) {
  json root;
  root["clock_period"] = topo.clock_period;
  root["photon_cap"] = topo.photon_cap;
  root["sources"] = json::array();
  for (const SourceNode& s : topo.sources) {
    root["sources"].push_back(
        json{{"name", s.name},
             {"kind", s.single_photon ? "single_photon" : "weak_coherent"},
             {"mu", s.params.mean_photon_number},
             {"spectral_mu", s.params.spectrum.mu},
             {"spectral_sigma", s.params.spectrum.sigma},
             {"polarization", polarization_to_json(s.params.polarization)},
             {"delay", s.params.delay},
             {"phase", s.params.phase},
             {"phase_randomized", s.params.phase_randomized},
             {"repetition_period", s.params.repetition_period},
             {"emit_offset", s.emit_offset}});
  }
  root["devices"] = json::array();
  for (const DeviceNode& d : topo.devices) root["devices"].push_back(device_to_json(d));
  root["detectors"] = json::array();
  for (const DetectorNode& d : topo.detectors) {
    root["detectors"].push_back(
        json{{"name", d.name},
             {"efficiency", d.params.efficiency},
             {"dark_count_rate", d.params.dark_count_rate},
             {"afterpulse", d.params.afterpulse_prob},
             {"jitter", d.params.timing_jitter},
             {"resolves_photon_number", d.params.resolves_photon_number},
             {"enabled", d.params.enabled},
             {"gate_width", d.params.gate_width},
             {"gate_offset", d.gate_offset}});
  }
  root["links"] = json::array();
  for (const RouteInfo& r : topo.routes) {
    if (!r.to) continue;  // sink routes are an internal artifact
    root["links"].push_back(json{{"from", endpoint_name(topo, r.from)},
                                 {"to", endpoint_name(topo, *r.to)}});
  }
  json exp;
  exp["mode"] = topo.experiment.analytic ? "analytic" : "monte_carlo";
  exp["trials"] = topo.experiment.trials;
  if (topo.experiment.sweep) {
    exp["sweep"] = json{{"parameter", topo.experiment.sweep->parameter},
                        {"start", topo.experiment.sweep->start},
                        {"end", topo.experiment.sweep->end},
                        {"points", topo.experiment.sweep->points}};
  }
  exp["coincidence"] = json::array();
  for (const auto& [a, b] : topo.experiment.coincidence_pairs) {
    exp["coincidence"].push_back(json::array({a, b}));
  }
  root["experiment"] = exp;
  return root.dump(2);
}

void set_parameter(Topology& topo, const std::string& path, double value) {
  const auto dot = path.find('.');
  if (dot == std::string::npos) {
    throw ConfigError("parameter path '" + path + "' must be 'node.field'");
  }
  const std::string node = path.substr(0, dot);
  const std::string field = path.substr(dot + 1);
  auto fail = [&]() -> void {
    throw ConfigError("unknown parameter path '" + path + "'");
  };

  for (SourceNode& s : topo.sources) {
    if (s.name != node) continue;
    if (field == "delay") s.params.delay = value;
    else if (field == "phase") s.params.phase = value;
    else if (field == "mu") s.params.mean_photon_number = value;
    else if (field == "emit_offset") s.emit_offset = value;
    else if (field == "pol_angle") {
      s.params.polarization = {std::abs(std::cos(value)), std::abs(std::sin(value)),
                               s.params.polarization.delta_phase};
    } else fail();
    return;
  }
  for (DeviceNode& d : topo.devices) {
    if (d.name != node) continue;
    std::visit(
        [&](auto& p) {
          using T = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<T, components::BsParams>) {
            if (field == "loss") p.loss_db = value;
            else if (field == "ratio_t") { p.ratio_t = value; p.ratio_r = 1.0 - value; }
            else fail();
          } else if constexpr (std::is_same_v<T, components::PbsParams>) {
            if (field == "loss_h") p.loss_h_db = value;
            else if (field == "loss_v") p.loss_v_db = value;
            else if (field == "extinction_ratio") p.extinction_ratio = value;
            else fail();
          } else if constexpr (std::is_same_v<T, components::AttenuatorParams>) {
            if (field == "loss") p.loss_db = value;
            else fail();
          } else if constexpr (std::is_same_v<T, components::FilterParams>) {
            if (field == "in_band_loss") p.in_band_loss_db = value;
            else if (field == "out_of_band_loss") p.out_of_band_loss_db = value;
            else if (field == "band_lo") p.band_lo = value;
            else if (field == "band_hi") p.band_hi = value;
            else fail();
          } else if constexpr (std::is_same_v<T, components::CirculatorParams>) {
            if (field == "loss") p.loss_db = value;
            else fail();
          } else if constexpr (std::is_same_v<
                                   T, components::PolarizationModulatorParams>) {
            if (field == "pol_angle") {
              p.target = {std::abs(std::cos(value)), std::abs(std::sin(value)),
                          p.target.delta_phase};
            } else if (field == "delta_phase") p.target.delta_phase = value;
            else if (field == "loss") p.loss_db = value;
            else fail();
          } else if constexpr (std::is_same_v<T, components::PhaseModulatorParams>) {
            if (field == "phase") p.target_phase = value;
            else if (field == "loss") p.loss_db = value;
            else fail();
          } else if constexpr (std::is_same_v<T, components::IsolatorParams>) {
            if (field == "loss") p.loss_db = value;
            else if (field == "isolation") p.isolation_db = value;
            else fail();
          } else if constexpr (std::is_same_v<T, components::SwitchParams>) {
            if (field == "loss") p.loss_db = value;
            else if (field == "isolation") p.isolation_db = value;
            else if (field == "selected_port") p.selected_port = static_cast<int>(value);
            else fail();
          } else if constexpr (std::is_same_v<T, components::WaveplateParams>) {
            if (field == "relative_phase") p.relative_phase = value;
            else if (field == "offset_angle") p.offset_angle = value;
            else if (field == "loss") p.loss_db = value;
            else fail();
          } else if constexpr (std::is_same_v<T, components::FiberParams>) {
            if (field == "length") p.length_km = value;
            else if (field == "attenuation") p.alpha_db_per_km = value;
            else fail();
          } else if constexpr (std::is_same_v<T, components::FaradayMirrorParams>) {
            if (field == "theta") p.theta = value;
            else if (field == "loss") p.loss_db = value;
            else fail();
          }
        },
        d.params);
    return;
  }
  for (DetectorNode& d : topo.detectors) {
    if (d.name != node) continue;
    if (field == "efficiency") d.params.efficiency = value;
    else if (field == "dark_count_rate") d.params.dark_count_rate = value;
    else if (field == "afterpulse") d.params.afterpulse_prob = value;
    else if (field == "gate_width") d.params.gate_width = value;
    else fail();
    return;
  }
  fail();
}

}  // namespace focksim::engine
