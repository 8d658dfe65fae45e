// Command-line front end: runs a named preset or an INI scenario file and
// writes the resulting dip curve, visibility sweep or amplitude map.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "spdc/io.hpp"
#include "spdc/presets.hpp"
#include "spdc/scenario.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitNonConverged = 3;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "spdcdip: coincidence-dip and two-photon-amplitude calculator for a "
      "femtosecond-pumped collinear type-II downconversion interferometer"};

  std::string preset, config_path, out_dir = ".";
  int threads = 1;
  int quad_order = 0, quad_max_refine = 0;
  double quad_tol = 0.0;
  bool list_presets = false, allow_nonconverged = false;

  auto* preset_opt =
      app.add_option("--preset", preset, "run a built-in preset");
  auto* config_opt =
      app.add_option("--config", config_path, "run an INI scenario file");
  preset_opt->excludes(config_opt);
  app.add_option("--out", out_dir,
                 "output directory (created if missing; default '.')");
  app.add_option("--threads", threads, "worker threads (default 1)")
      ->check(CLI::Range(1, 256));
  auto* order_opt = app.add_option("--quad-order", quad_order,
                                   "override quadrature base order");
  auto* tol_opt = app.add_option("--quad-tol", quad_tol,
                                 "override quadrature relative tolerance");
  auto* refine_opt = app.add_option("--quad-max-refine", quad_max_refine,
                                    "override quadrature refinement limit");
  app.add_flag("--allow-nonconverged", allow_nonconverged,
               "exit 0 even if some samples did not converge");
  app.add_flag("--list-presets", list_presets, "list preset names and exit");

  CLI11_PARSE(app, argc, argv);

  try {
    if (list_presets) {
      for (const std::string& name : spdc::preset_names()) {
        for (const spdc::ScenarioConfig& cfg : spdc::preset_scenarios(name))
          std::cout << name << "\t" << cfg.output_file << "\t" << cfg.name
                    << "\n";
      }
      return 0;
    }

    std::vector<spdc::ScenarioConfig> scenarios;
    if (!preset.empty()) {
      scenarios = spdc::preset_scenarios(preset);
    } else if (!config_path.empty()) {
      scenarios.push_back(spdc::load_scenario(config_path));
    } else {
      std::cerr << "error: give --preset, --config or --list-presets\n";
      return kExitUsage;
    }

    for (spdc::ScenarioConfig& cfg : scenarios) {
      if (order_opt->count() > 0) cfg.quad.base_order = quad_order;
      if (tol_opt->count() > 0) cfg.quad.rel_tol = quad_tol;
      if (refine_opt->count() > 0) cfg.quad.max_refinements = quad_max_refine;
      cfg.validate();
    }

    std::filesystem::create_directories(out_dir);
    bool all_converged = true;
    for (const spdc::ScenarioConfig& cfg : scenarios) {
      const spdc::ScenarioResult result = spdc::run_scenario(cfg, threads);
      const std::filesystem::path path =
          std::filesystem::path(out_dir) / cfg.output_file;
      std::ofstream os(path);
      if (!os.good()) {
        std::cerr << "error: cannot open " << path.string() << "\n";
        return kExitUsage;
      }
      spdc::write_result(os, cfg, result);
      std::cout << path.string() << (result.all_converged ? "" : "  [not converged]")
                << "\n";
      all_converged = all_converged && result.all_converged;
    }
    if (!all_converged && !allow_nonconverged) {
      std::cerr << "error: some samples did not converge (see output files; "
                   "re-run with --quad-max-refine or --allow-nonconverged)\n";
      return kExitNonConverged;
    }
    return 0;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
