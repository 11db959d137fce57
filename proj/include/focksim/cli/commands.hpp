#pragma once
#include <cstdint>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "focksim/engine/simulation.hpp"
#include "focksim/engine/topology.hpp"

namespace focksim::cli {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr std::uint64_t kDefaultSeed = 20250613;

/// sigma of the built-in HOM source: the 65 GHz linewidth of a typical
/// 1550 nm pulse, interpreted as ordinary frequency (x 2pi into rad/s).
inline constexpr double kDefaultHomSigma = 2.0 * std::numbers::pi * 65e9;

struct MziOptions {
  double phase_start = 0.0;
  double phase_end = 2.0 * std::numbers::pi;
  int points = 32;
  std::uint64_t trials = 10000;
  std::uint64_t seed = kDefaultSeed;
  std::string out_dir = "out";
  int threads = 1;
  bool analytic = false;
  std::vector<std::pair<std::string, double>> overrides;  // node.field = value
};

enum class HomMode { kPolarization, kDelay };

struct HomOptions {
  HomMode mode = HomMode::kPolarization;
  double start = 0.0;
  double end = std::numbers::pi;  // delay mode defaults to [-60 ps, 60 ps]
  bool range_set = false;
  int points = 21;
  std::uint64_t trials = 10000;
  double sigma = kDefaultHomSigma;  // rad/s
  std::uint64_t seed = kDefaultSeed;
  std::string out_dir = "out";
  int threads = 1;
  bool analytic = false;
  std::vector<std::pair<std::string, double>> overrides;
};

struct RunOptions {
  std::string config_path;
  std::uint64_t seed = kDefaultSeed;
  std::string out_dir = "out";
  int threads = 1;
};

/// Built-in topologies; also used directly by the test suites.
engine::Topology make_mzi_topology(const MziOptions& opt);
engine::Topology make_hom_topology(const HomOptions& opt);

/// Writes mzi.csv plus a manifest. In ideal-device mode the exit code is 0
/// iff every point's Wilson interval contains the interference curve.
int run_mzi(const MziOptions& opt);

/// Writes hom.csv plus a manifest; prints the spectral FWHM in delay mode.
int run_hom(const HomOptions& opt);

/// Runs a netlist config: detection-record CSV, statistics CSV, manifest.
int run_config(const RunOptions& opt);

/// FNV-1a 64-bit content hash used in CSV metadata and manifests.
std::uint64_t fnv1a64(std::string_view data);
std::string hash_string(std::string_view data);

}  // namespace focksim::cli
