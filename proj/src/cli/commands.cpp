#include "focksim/cli/commands.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "focksim/errors.hpp"
#include "json.hpp"

namespace focksim::cli {

namespace fs = std::filesystem;
using engine::Topology;
using nlohmann::json;

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hash_string(std::string_view data) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "fnv1a64:%016" PRIx64, fnv1a64(data));
  return buf;
}

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct Manifest {
  std::string command;
  std::uint64_t seed = 0;
  std::string out_dir;
  std::string config_hash;
  std::string config_path;
  std::vector<std::pair<std::string, double>> overrides;
  std::vector<std::pair<std::string, std::string>> files;  // name, hash

  json to_json(bool finalized) const {
    json j;
    j["tool_version"] = kToolVersion;
    j["command"] = command;
    j["master_seed"] = seed;
    j["out_dir"] = out_dir;
    j["config_hash"] = config_hash;
    if (!config_path.empty()) j["config_path"] = config_path;
    j["overrides"] = json::array();
    for (const auto& [k, v] : overrides) {
      j["overrides"].push_back(json::array({k, v}));
    }
    j["finalized"] = finalized;
    j["files"] = json::array();
    for (const auto& [name, hash] : files) {
      j["files"].push_back(json{{"name", name}, {"hash", hash}});
    }
    return j;
  }

  void write(const fs::path& dir, bool finalized) const {
    std::ofstream out(dir / "manifest.json");
    out << to_json(finalized).dump(2) << "\n";
  }
};

/// Writes a CSV with '#'-prefixed metadata, records its content hash in the
/// manifest.
void write_csv(const fs::path& path, const std::string& header,
               const std::vector<std::string>& rows, std::uint64_t seed,
               const std::string& config_hash, Manifest& manifest) {
  std::ostringstream body;
  body << "# focksim " << kToolVersion << "\n";
  body << "# seed: " << seed << "\n";
  body << "# config_hash: " << config_hash << "\n";
  body << header << "\n";
  for (const std::string& row : rows) body << row << "\n";
  const std::string text = body.str();
  std::ofstream out(path);
  out << text;
  manifest.files.emplace_back(path.filename().string(), hash_string(text));
}

void apply_overrides(Topology& topo,
                     const std::vector<std::pair<std::string, double>>& ov) {
  for (const auto& [path, value] : ov) engine::set_parameter(topo, path, value);
}

/// Theory column for non-ideal devices: the analytic engine evaluated at
/// one sweep point.
engine::AnalyticPoint analytic_at(const Topology& base, double sweep_value) {
  Topology topo = base;
  if (topo.experiment.sweep) {
    engine::set_parameter(topo, topo.experiment.sweep->parameter, sweep_value);
  }
  topo.experiment.analytic = true;
  return engine::run_point_analytic(topo);
}

}  // namespace

Topology make_mzi_topology(const MziOptions& opt) {
  // src --- bs1 ---(arm c: pm)--- bs2 --- d1/d2. The detector on bs2.out_d
  // sees (1 + cos phi)/2 under this beamsplitter sign convention.
  json netlist = {
      {"clock_period", 1e-7},
      {"sources",
       {{{"name", "src"}, {"kind", "single_photon"}}}},
      {"devices",
       {{{"name", "bs1"}, {"kind", "bs"}, {"ratio_t", 0.5}, {"ratio_r", 0.5}},
        {{"name", "pm"}, {"kind", "phase_modulator"}, {"phase", 0.0}},
        {{"name", "bs2"}, {"kind", "bs"}, {"ratio_t", 0.5}, {"ratio_r", 0.5}}}},
      {"detectors", {{{"name", "d1"}}, {{"name", "d2"}}}},
      {"links",
       {{{"from", "src.out"}, {"to", "bs1.in_a"}},
        {{"from", "bs1.out_c"}, {"to", "pm.a"}},
        {{"from", "pm.b"}, {"to", "bs2.in_a"}},
        {{"from", "bs1.out_d"}, {"to", "bs2.in_b"}},
        {{"from", "bs2.out_d"}, {"to", "d1.in"}},
        {{"from", "bs2.out_c"}, {"to", "d2.in"}}}},
      {"experiment",
       {{"mode", opt.analytic ? "analytic" : "monte_carlo"},
        {"trials", opt.trials},
        {"sweep",
         {{"parameter", "pm.phase"},
          {"start", opt.phase_start},
          {"end", opt.phase_end},
          {"points", opt.points}}}}}};
  Topology topo = engine::load_topology(netlist.dump());
  apply_overrides(topo, opt.overrides);
  return topo;
}

Topology make_hom_topology(const HomOptions& opt) {
  const bool pol = (opt.mode == HomMode::kPolarization);
  const double start = opt.range_set ? opt.start : (pol ? 0.0 : -60e-12);
  const double end = opt.range_set ? opt.end : (pol ? std::numbers::pi : 60e-12);
  json netlist = {
      {"clock_period", 1e-7},
      {"sources",
       {{{"name", "src1"}, {"kind", "single_photon"}, {"spectral_sigma", opt.sigma}},
        {{"name", "src2"}, {"kind", "single_photon"}, {"spectral_sigma", opt.sigma}}}},
      {"devices",
       {{{"name", "bs"}, {"kind", "bs"}, {"ratio_t", 0.5}, {"ratio_r", 0.5}}}},
      {"detectors", {{{"name", "dc"}}, {{"name", "dd"}}}},
      {"links",
       {{{"from", "src1.out"}, {"to", "bs.in_a"}},
        {{"from", "src2.out"}, {"to", "bs.in_b"}},
        {{"from", "bs.out_c"}, {"to", "dc.in"}},
        {{"from", "bs.out_d"}, {"to", "dd.in"}}}},
      {"experiment",
       {{"mode", opt.analytic ? "analytic" : "monte_carlo"},
        {"trials", opt.trials},
        {"sweep",
         {{"parameter", pol ? "src2.pol_angle" : "src2.delay"},
          {"start", start},
          {"end", end},
          {"points", opt.points}}},
        {"coincidence", {{"dc", "dd"}}}}}};
  Topology topo = engine::load_topology(netlist.dump());
  apply_overrides(topo, opt.overrides);
  return topo;
}

int run_mzi(const MziOptions& opt) {
  Topology topo = make_mzi_topology(opt);
  const std::string config = engine::topology_to_json(topo);
  const std::string config_hash = hash_string(config);

  fs::create_directories(opt.out_dir);
  Manifest manifest{"mzi", opt.seed, opt.out_dir, config_hash, "", opt.overrides, {}};
  manifest.write(opt.out_dir, false);

  const engine::ExperimentResult result =
      engine::run_experiment(topo, opt.seed, opt.threads);
  const int d1 = 0, d2 = 1;  // declaration order in the netlist

  const bool ideal = opt.overrides.empty();
  bool contained = true;
  std::vector<std::string> rows;
  for (const engine::PointStatistics& pt : result.points) {
    double theory_d1, theory_d2;
    if (ideal) {
      theory_d1 = 0.5 * (1.0 + std::cos(pt.sweep_value));
      theory_d2 = 0.5 * (1.0 - std::cos(pt.sweep_value));
    } else {
      const engine::AnalyticPoint ap = analytic_at(topo, pt.sweep_value);
      theory_d1 = ap.click_probability[d1];
      theory_d2 = ap.click_probability[d2];
    }
    if (!opt.analytic && ideal) {
      contained = contained &&
                  theory_d1 >= pt.click_lo[d1] && theory_d1 <= pt.click_hi[d1];
    }
    std::ostringstream row;
    row << format_double(pt.sweep_value) << ',' << format_double(pt.click_freq[d1])
        << ',' << format_double(pt.click_lo[d1]) << ','
        << format_double(pt.click_hi[d1]) << ',' << format_double(pt.click_freq[d2])
        << ',' << format_double(pt.click_lo[d2]) << ','
        << format_double(pt.click_hi[d2]) << ',' << format_double(theory_d1)
        << ',' << format_double(theory_d2);
    rows.push_back(row.str());
  }
  write_csv(fs::path(opt.out_dir) / "mzi.csv",
            "phase_rad,p_d1,p_d1_lo,p_d1_hi,p_d2,p_d2_lo,p_d2_hi,theory_d1,"
            "theory_d2",
            rows, opt.seed, config_hash, manifest);
  manifest.write(opt.out_dir, true);

  std::cout << "mzi: " << result.points.size() << " points, "
            << opt.trials << " trials/point -> "
            << (fs::path(opt.out_dir) / "mzi.csv").string() << "\n";
  if (!opt.analytic && ideal) {
    std::cout << "mzi: theory containment "
              << (contained ? "PASS" : "FAIL") << "\n";
    return contained ? 0 : 1;
  }
  return 0;
}

int run_hom(const HomOptions& opt) {
  Topology topo = make_hom_topology(opt);
  const std::string config = engine::topology_to_json(topo);
  const std::string config_hash = hash_string(config);
  const bool pol = (opt.mode == HomMode::kPolarization);

  fs::create_directories(opt.out_dir);
  Manifest manifest{"hom", opt.seed, opt.out_dir, config_hash, "", opt.overrides, {}};
  manifest.write(opt.out_dir, false);

  const engine::ExperimentResult result =
      engine::run_experiment(topo, opt.seed, opt.threads);

  const bool ideal = opt.overrides.empty();
  std::vector<std::string> rows;
  for (const engine::PointStatistics& pt : result.points) {
    double theory;
    if (!ideal) {
      theory = analytic_at(topo, pt.sweep_value).coincidence[0];
    } else if (pol) {
      const double s = std::sin(pt.sweep_value);
      theory = 0.5 * s * s;
    } else {
      const double sdt = opt.sigma * pt.sweep_value;
      theory = 0.5 - 0.5 * std::exp(-sdt * sdt);
    }
    std::ostringstream row;
    row << format_double(pt.sweep_value) << ',' << format_double(pt.coin_freq[0])
        << ',' << format_double(pt.coin_lo[0]) << ','
        << format_double(pt.coin_hi[0]) << ',' << format_double(theory);
    rows.push_back(row.str());
  }
  write_csv(fs::path(opt.out_dir) / "hom.csv",
            std::string(pol ? "delta_theta_rad" : "delta_t_s") +
                ",coincidence,coincidence_lo,coincidence_hi,theory",
            rows, opt.seed, config_hash, manifest);
  manifest.write(opt.out_dir, true);

  std::cout << "hom(" << (pol ? "pol" : "delay") << "): "
            << result.points.size() << " points, " << opt.trials
            << " trials/point -> " << (fs::path(opt.out_dir) / "hom.csv").string()
            << "\n";
  if (!pol) {
    const double fwhm = 2.0 * std::sqrt(2.0 * std::log(2.0)) * opt.sigma;
    std::cout << "hom: sigma = " << format_double(opt.sigma)
              << " rad/s, spectral FWHM = " << format_double(fwhm)
              << " rad/s\n";
  }
  return 0;
}

int run_config(const RunOptions& opt) {
  if (!fs::exists(opt.config_path)) {
    std::cerr << "focksim: config file not found: " << opt.config_path << "\n";
    return 2;
  }
  Topology topo = engine::load_topology_file(opt.config_path);
  const std::string config = engine::topology_to_json(topo);
  const std::string config_hash = hash_string(config);

  fs::create_directories(opt.out_dir);
  Manifest manifest{"run", opt.seed, opt.out_dir, config_hash, opt.config_path,
                    {}, {}};
  manifest.write(opt.out_dir, false);

  const engine::ExperimentResult result =
      engine::run_experiment(topo, opt.seed, opt.threads, /*keep_records=*/true);

  // Detection records, one row per detector gate.
  std::vector<std::string> record_rows;
  for (std::size_t i = 0; i < result.points.size(); ++i) {
    for (const detector::DetectionRecord& r : result.points[i].records) {
      std::ostringstream row;
      row << i << ',' << r.trial << ','
          << result.detector_names[static_cast<std::size_t>(r.detector)] << ','
          << (r.clicked ? 1 : 0) << ',' << r.photon_count << ','
          << format_double(r.timestamp) << ',' << (r.aborted ? 1 : 0);
      record_rows.push_back(row.str());
    }
  }
  write_csv(fs::path(opt.out_dir) / "records.csv",
            "point,trial,detector_id,clicked,photon_count,timestamp_s,aborted",
            record_rows, opt.seed, config_hash, manifest);

  // Aggregated statistics table.
  std::ostringstream header;
  header << "point,param_value";
  for (const std::string& name : result.detector_names) {
    header << ',' << name << "_freq," << name << "_lo," << name << "_hi";
  }
  for (const auto& [a, b] : result.pair_names) {
    header << ",coinc_" << a << '_' << b << "_freq,coinc_" << a << '_' << b
           << "_lo,coinc_" << a << '_' << b << "_hi";
  }
  header << ",trials,aborted,undetected,exceedance";
  std::vector<std::string> stat_rows;
  for (std::size_t i = 0; i < result.points.size(); ++i) {
    const engine::PointStatistics& pt = result.points[i];
    std::ostringstream row;
    row << i << ',' << format_double(pt.sweep_value);
    for (std::size_t d = 0; d < result.detector_names.size(); ++d) {
      row << ',' << format_double(pt.click_freq[d]) << ','
          << format_double(pt.click_lo[d]) << ','
          << format_double(pt.click_hi[d]);
    }
    for (std::size_t p = 0; p < result.pair_names.size(); ++p) {
      row << ',' << format_double(pt.coin_freq[p]) << ','
          << format_double(pt.coin_lo[p]) << ','
          << format_double(pt.coin_hi[p]);
    }
    row << ',' << pt.trials << ',' << pt.aborted << ',' << pt.undetected_photons
        << ',' << pt.exceedance_redraws;
    stat_rows.push_back(row.str());
  }
  write_csv(fs::path(opt.out_dir) / "stats.csv", header.str(), stat_rows,
            opt.seed, config_hash, manifest);
  manifest.write(opt.out_dir, true);

  std::cout << "run: " << result.points.size() << " points -> "
            << (fs::path(opt.out_dir) / "stats.csv").string() << "\n";
  return 0;
}

}  // namespace focksim::cli
