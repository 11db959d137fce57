#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "focksim/cli/commands.hpp"
#include "focksim/errors.hpp"
#include "focksim/fock/permanent.hpp"

namespace {

std::string default_out_dir() {
  if (const char* env = std::getenv("FOCKSIM_OUT")) return env;
  return "out";
}

void add_override_option(CLI::App* cmd,
                         std::vector<std::pair<std::string, double>>& out) {
  cmd->add_option_function<std::vector<std::string>>(
         "--set",
         [&out](const std::vector<std::string>& items) {
           for (const std::string& item : items) {
             const auto eq = item.find('=');
             if (eq == std::string::npos) {
               throw CLI::ValidationError("--set expects node.field=value");
             }
             out.emplace_back(item.substr(0, eq),
                              std::stod(item.substr(eq + 1)));
           }
         },
         "Device parameter override, node.field=value (base units); "
         "disables the ideal-mode exit-code check")
      ->take_all();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"focksim: Fock-state discrete-event simulator for QKD optics"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("focksim ") +
                                        focksim::cli::kToolVersion);

  focksim::cli::MziOptions mzi;
  mzi.out_dir = default_out_dir();
  CLI::App* cmd_mzi =
      app.add_subcommand("mzi", "Mach-Zehnder interference sweep");
  cmd_mzi->add_option("--phase-start", mzi.phase_start, "Sweep start, rad");
  cmd_mzi->add_option("--phase-end", mzi.phase_end, "Sweep end, rad");
  cmd_mzi->add_option("--points", mzi.points, "Sweep points")
      ->check(CLI::PositiveNumber);
  cmd_mzi->add_option("--trials", mzi.trials, "Trials per point");
  cmd_mzi->add_option("--seed", mzi.seed, "Master seed");
  cmd_mzi->add_option("--out", mzi.out_dir, "Output directory");
  cmd_mzi->add_option("--threads", mzi.threads, "Sweep-point worker threads");
  cmd_mzi->add_flag("--analytic", mzi.analytic,
                    "Exact probabilities instead of Monte Carlo");
  add_override_option(cmd_mzi, mzi.overrides);

  focksim::cli::HomOptions hom;
  hom.out_dir = default_out_dir();
  std::string hom_mode = "pol";
  double hom_start = 0.0, hom_end = 0.0;
  CLI::App* cmd_hom =
      app.add_subcommand("hom", "Hong-Ou-Mandel coincidence sweep");
  cmd_hom->add_option("--mode", hom_mode, "pol | delay")
      ->check(CLI::IsMember({"pol", "delay"}));
  CLI::Option* hom_start_opt = cmd_hom->add_option(
      "--start", hom_start, "Sweep start (rad in pol mode, s in delay mode)");
  CLI::Option* hom_end_opt =
      cmd_hom->add_option("--end", hom_end, "Sweep end");
  cmd_hom->add_option("--points", hom.points, "Sweep points")
      ->check(CLI::PositiveNumber);
  cmd_hom->add_option("--trials", hom.trials, "Trials per point");
  cmd_hom->add_option("--sigma", hom.sigma,
                      "Spectral sigma, rad/s (default 2*pi*65 GHz)");
  cmd_hom->add_option("--seed", hom.seed, "Master seed");
  cmd_hom->add_option("--out", hom.out_dir, "Output directory");
  cmd_hom->add_option("--threads", hom.threads, "Sweep-point worker threads");
  cmd_hom->add_flag("--analytic", hom.analytic,
                    "Exact probabilities instead of Monte Carlo");
  add_override_option(cmd_hom, hom.overrides);

  focksim::cli::RunOptions run;
  run.out_dir = default_out_dir();
  CLI::App* cmd_run = app.add_subcommand("run", "Run a netlist config file");
  cmd_run->add_option("--config", run.config_path, "Netlist JSON path")
      ->required();
  cmd_run->add_option("--seed", run.seed, "Master seed");
  cmd_run->add_option("--out", run.out_dir, "Output directory");
  cmd_run->add_option("--threads", run.threads, "Sweep-point worker threads");

  CLI::App* cmd_info = app.add_subcommand("info", "Print build information");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_mzi->parsed()) return focksim::cli::run_mzi(mzi);
    if (cmd_hom->parsed()) {
      hom.mode = (hom_mode == "pol") ? focksim::cli::HomMode::kPolarization
                                     : focksim::cli::HomMode::kDelay;
      if (hom_start_opt->count() || hom_end_opt->count()) {
        hom.range_set = true;
        hom.start = hom_start;
        hom.end = hom_end;
      }
      return focksim::cli::run_hom(hom);
    }
    if (cmd_run->parsed()) return focksim::cli::run_config(run);
    if (cmd_info->parsed()) {
      std::cout << "focksim " << focksim::cli::kToolVersion
                << ", permanent backend: "
                << focksim::fock::permanent_backend_name(
                       focksim::fock::active_permanent_backend())
                << "\n";
      return 0;
    }
  } catch (const focksim::ConfigError& e) {
    std::cerr << "focksim: config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "focksim: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
