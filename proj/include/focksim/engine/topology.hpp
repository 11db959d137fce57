#pragma once
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "focksim/components/components.hpp"
#include "focksim/detector/spd.hpp"
#include "focksim/sources/source.hpp"

namespace focksim::engine {

enum class DeviceKind {
  kBs,
  kPbs,
  kAttenuator,
  kFilter,
  kCirculator,
  kPolarizationModulator,
  kPhaseModulator,
  kIsolator,
  kSwitch,
  kWaveplate,
  kFiber,
  kFaradayMirror,
};

const char* device_kind_name(DeviceKind k);

using DeviceParams =
    std::variant<components::BsParams, components::PbsParams,
                 components::AttenuatorParams, components::FilterParams,
                 components::CirculatorParams,
                 components::PolarizationModulatorParams,
                 components::PhaseModulatorParams, components::IsolatorParams,
                 components::SwitchParams, components::WaveplateParams,
                 components::FiberParams, components::FaradayMirrorParams>;

/// One named connection point. A port can consume one route and produce one
/// route; bidirectional two-port devices use both slots.
struct Port {
  std::string name;
  bool can_consume = false;
  bool can_produce = false;
  int in_route = -1;   // route this port consumes
  int out_route = -1;  // route this port produces
};

struct SourceNode {
  std::string name;
  bool single_photon = true;
  sources::SourceParams params;
  double emit_offset = 0.0;  // s
  int truncation_nt = 0;     // weak-coherent Fock truncation
  int out_route = -1;
};

struct DeviceNode {
  std::string name;
  DeviceKind kind{};
  DeviceParams params;
  std::vector<Port> ports;

  int port_index(const std::string& port_name) const;
};

struct DetectorNode {
  std::string name;
  detector::SpdParams params;
  double gate_offset = 0.0;  // s, shifts the gate grid
  int in_route = -1;
};

struct Endpoint {
  enum Kind { kSource, kDevice, kDetector } kind = kDevice;
  int node = -1;
  int port = -1;  // device port index; unused for sources/detectors
};

struct RouteInfo {
  Endpoint from;
  std::optional<Endpoint> to;  // absent: dangling sink, reported undetected
};

struct SweepSpec {
  std::string parameter;  // "node.field"
  double start = 0.0;
  double end = 0.0;
  int points = 1;
};

struct ExperimentSpec {
  bool analytic = false;
  std::uint64_t trials = 0;
  std::optional<SweepSpec> sweep;
  std::vector<std::pair<std::string, std::string>> coincidence_pairs;
};

struct Topology {
  std::vector<SourceNode> sources;
  std::vector<DeviceNode> devices;
  std::vector<DetectorNode> detectors;
  std::vector<RouteInfo> routes;
  ExperimentSpec experiment;
  double clock_period = 1e-7;  // s, detector gate grid
  int photon_cap = fock::kDefaultPhotonCap;

  int detector_index(const std::string& name) const;
};

/// Parses and validates a JSON netlist. Every failure (unknown device kind,
/// dangling reference, duplicate producer, unit mismatch, unknown key)
/// throws ConfigError or TopologyError carrying the JSON path.
Topology load_topology(const std::string& json_text);
Topology load_topology_file(const std::string& path);

/// Serializes the effective netlist back to canonical JSON (used for config
/// hashing and manifests).
std::string topology_to_json(const Topology& topo);

/// Sets a sweepable parameter addressed as "node.field" (base units).
/// Throws ConfigError on unknown paths.
void set_parameter(Topology& topo, const std::string& path, double value);

}  // namespace focksim::engine
