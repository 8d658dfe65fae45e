#pragma once

// Declarative description of one computation: a setup plus either a
// delay-line sweep (dip curve), a pump-duration sweep (visibility curve) or
// an amplitude map.  Scenarios are read from INI-style text files; built-in
// presets produce the same structures programmatically, so a preset and its
// INI transcription yield byte-identical output files.

#include <iosfwd>
#include <string>
#include <vector>

#include "spdc/amplitude.hpp"
#include "spdc/interference.hpp"
#include "spdc/quadrature.hpp"

namespace spdc {

enum class RunMode { Dip, Visibility, Grid };

enum class SweepAxis { DelayLength, PumpDuration };

struct SweepSpec {
  SweepAxis axis = SweepAxis::DelayLength;
  double min = 0.0;
  double max = 0.0;
  int count = 0;
  bool log_spacing = false;
  RhoMethod method = RhoMethod::Auto;
};

struct GridSpec {
  Eigen::Index n_t = 121;
  Eigen::Index n_tau = 121;
  bool explicit_window = false;  // otherwise sized automatically
  double t_min = 0.0, t_max = 0.0;
  double tau_min = 0.0, tau_max = 0.0;
  bool analytic = false;  // requires an explicit window
};

struct ScenarioConfig {
  std::string name;  // preset variant or config file name (informational)
  RunMode mode = RunMode::Dip;
  SetupConfig setup;
  std::string spectrum_file;  // optional tabulated pump spectrum
  SweepSpec sweep;
  GridSpec grid;
  QuadratureConfig quad;
  std::string output_file = "out.csv";

  void validate() const;
};

// Sweep sample positions (linear or logarithmic spacing, `count` points).
Eigen::VectorXd sweep_values(const SweepSpec& sweep);

// Parses INI text: `[section]` headers, `key = value` lines, '#'/';' comment
// lines.  Unknown sections or keys, duplicate keys and malformed numbers are
// rejected with "<name>:<line>: ..." messages.
ScenarioConfig parse_scenario(std::istream& in, const std::string& name);
ScenarioConfig load_scenario(const std::string& path);

struct ScenarioResult {
  RunMode mode = RunMode::Dip;
  DipCurve dip;                            // mode == Dip
  std::vector<VisibilitySample> visibility;  // mode == Visibility
  AmplitudeGrid grid;                      // mode == Grid
  bool all_converged = true;
};

ScenarioResult run_scenario(const ScenarioConfig& config, int threads = 1);

// Writes the result in the format matching its mode (see io.hpp).
void write_result(std::ostream& os, const ScenarioConfig& config,
                  const ScenarioResult& result);

}  // namespace spdc
