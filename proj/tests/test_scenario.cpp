#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "spdc/autocorr.hpp"
#include "spdc/io.hpp"
#include "spdc/presets.hpp"
#include "spdc/pump.hpp"
#include "spdc/scenario.hpp"

using namespace spdc;
using doctest::Approx;

namespace {

ScenarioConfig parse_str(const std::string& text,
                         const std::string& name = "cfg") {
  std::istringstream in(text);
  return parse_scenario(in, name);
}

// Smallest accepted dip scenario: required keys only, no filters.
const char* kMinimalIni =
    "[crystal]\n"
    "L_mm = 3\n"
    "inv_vp_s_per_mm = 57.05e-13\n"
    "inv_v1_s_per_mm = 56.2e-13\n"
    "inv_v2_s_per_mm = 54.26e-13\n"
    "[pump]\n"
    "tau_Di_s = 1.55e-13\n"
    "[delay]\n"
    "inv_g1_s_per_mm = 51.81e-13\n"
    "inv_g2_s_per_mm = 52.08e-13\n"
    "[sweep]\n"
    "min = 0\n"
    "max = 20\n"
    "count = 5\n";

std::string setup_header(const SetupConfig& setup) {
  std::ostringstream os;
  write_setup_header(os, setup);
  return os.str();
}

std::string result_text(const ScenarioConfig& cfg, const ScenarioResult& r) {
  std::ostringstream os;
  write_result(os, cfg, r);
  return os.str();
}

}  // namespace

TEST_SUITE("scenario") {

TEST_CASE("full INI transcribes one of the built-in dip presets") {
  const ScenarioConfig parsed = parse_str(
      "# dip scan, moderate pump dispersion, 50 nm filters\n"
      "mode = dip\n"
      "\n"
      "[crystal]\n"
      "L_mm = 3.0\n"
      "inv_vp_s_per_mm = 57.05e-13\n"
      "inv_v1_s_per_mm = 56.2e-13\n"
      "inv_v2_s_per_mm = 54.26e-13\n"
      "Dp_s2_per_mm = 5e-26\n"
      "\n"
      "[pump]\n"
      "tau_Di_s = 1.55e-13\n"
      "chirp_ai = 0\n"
      "\n"
      "[delay]\n"
      "inv_g1_s_per_mm = 51.81e-13\n"
      "inv_g2_s_per_mm = 52.08e-13\n"
      "\n"
      "[filters]\n"
      "sigma1_nm = 50\n"
      "sigma2_nm = 50\n"
      "\n"
      "[sweep]\n"
      "axis = l\n"
      "min = 0\n"
      "max = 25\n"
      "count = 126\n"
      "spacing = linear\n"
      "\n"
      "[quadrature]\n"
      "order = 32\n"
      "tol = 1e-8\n"
      "max_refine = 4\n"
      "\n"
      "[output]\n"
      "file = fig4a_Dp5e-26.csv\n");
  const ScenarioConfig preset = preset_scenarios("fig4a")[1];
  // The resolved setups must coincide bit for bit: identical header text.
  CHECK(setup_header(parsed.setup) == setup_header(preset.setup));
  CHECK(parsed.mode == preset.mode);
  CHECK(parsed.sweep.axis == preset.sweep.axis);
  CHECK(parsed.sweep.min == preset.sweep.min);
  CHECK(parsed.sweep.max == preset.sweep.max);
  CHECK(parsed.sweep.count == preset.sweep.count);
  CHECK(parsed.sweep.log_spacing == preset.sweep.log_spacing);
  CHECK(parsed.sweep.method == preset.sweep.method);
  CHECK(parsed.quad.base_order == preset.quad.base_order);
  CHECK(parsed.quad.rel_tol == preset.quad.rel_tol);
  CHECK(parsed.quad.max_refinements == preset.quad.max_refinements);
  CHECK(parsed.output_file == preset.output_file);
}

TEST_CASE("defaults fill everything the INI leaves out") {
  const ScenarioConfig cfg = parse_str(kMinimalIni);
  CHECK(cfg.mode == RunMode::Dip);
  CHECK(cfg.setup.crystal.Dp == 0.0);
  CHECK(cfg.setup.pump_in.chirp_a == 0.0);
  CHECK(cfg.setup.delay.length_l == 0.0);
  CHECK(std::isinf(cfg.setup.filters.sigma1));
  CHECK(std::isinf(cfg.setup.filters.sigma2));
  CHECK(cfg.setup.centers.omega_p ==
        Approx(2.0 * kPi * kSpeedOfLightNmS / 397.5).epsilon(1e-15));
  CHECK(cfg.setup.centers.degenerate());
  CHECK(cfg.sweep.axis == SweepAxis::DelayLength);
  CHECK_FALSE(cfg.sweep.log_spacing);
  CHECK(cfg.sweep.method == RhoMethod::Auto);
  CHECK(cfg.quad.base_order == 32);
  CHECK(cfg.quad.rel_tol == 1e-8);
  CHECK(cfg.quad.max_refinements == 4);
  CHECK(cfg.output_file == "out.csv");
  CHECK(cfg.spectrum_file.empty());
}

TEST_CASE("parse errors carry the file name and line number") {
  CHECK_THROWS_WITH_AS(parse_str("[crystal\n", "bad.ini"),
                       doctest::Contains("bad.ini:1: malformed section header"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_str("\n\njust words\n", "bad.ini"),
                       doctest::Contains("bad.ini:3: expected 'key = value'"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_str(" = 5\n", "bad.ini"),
                       doctest::Contains("bad.ini:1: empty key"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_str("mode =\n", "bad.ini"),
                       doctest::Contains("bad.ini:1: empty value for key 'mode'"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_str("[lens]\nf = 1\n", "bad.ini"),
                       doctest::Contains("bad.ini:1: unknown section [lens]"),
                       std::invalid_argument);

  const std::string base(kMinimalIni);
  CHECK_THROWS_WITH_AS(parse_str(base + "[crystal]\nL_mm = 4\n"),
                       doctest::Contains("duplicate key 'L_mm' in [crystal]"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_str(base + "[delay]\njunk_key = 1\n"),
                       doctest::Contains("unknown key 'junk_key' in [delay]"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_str("mode = banana\n" + base),
                       doctest::Contains("unknown mode 'banana'"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_str(base + "[sweep]\naxis = q\n"),
                       doctest::Contains("unknown sweep axis 'q'"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_str(base + "[sweep]\nspacing = geometric\n"),
                       doctest::Contains("unknown spacing 'geometric'"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_str(base + "[sweep]\nmethod = magic\n"),
                       doctest::Contains("unknown method 'magic'"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(
      parse_str(base + "[filters]\nsigma1_rad_s = 1e14\nsigma1_nm = 50\n"),
      doctest::Contains("not both"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_str(base + "[quadrature]\norder = 3.5\n"),
                       doctest::Contains("expected an integer for 'order'"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_str(base + "[crystal]\nD1_s2_per_mm = huge\n"),
                       doctest::Contains("expected a number for 'D1_s2_per_mm'"),
                       std::invalid_argument);

  // Missing required keys are reported by section and key.
  CHECK_THROWS_WITH_AS(parse_str("mode = dip\n", "bad.ini"),
                       doctest::Contains("[crystal] missing required key 'L_mm'"),
                       std::invalid_argument);

  std::string grid(kMinimalIni);
  grid.replace(0, 0, "mode = grid\n");
  CHECK_THROWS_WITH_AS(parse_str(grid + "[grid]\nanalytic = maybe\n"),
                       doctest::Contains("expected true/false for 'analytic'"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_str(grid + "[grid]\nt_min_s = -1e-12\n"),
                       doctest::Contains("window needs all of"),
                       std::invalid_argument);

  CHECK_THROWS_WITH_AS(load_scenario("/nonexistent/scan.ini"),
                       doctest::Contains("cannot open scenario file"),
                       std::invalid_argument);
}

TEST_CASE("scenario validation rejects inconsistent requests") {
  const ScenarioConfig good = parse_str(kMinimalIni);

  ScenarioConfig axis = good;
  axis.sweep.axis = SweepAxis::PumpDuration;
  CHECK_THROWS_WITH_AS(axis.validate(), doctest::Contains("dip mode sweeps"),
                       std::invalid_argument);
  ScenarioConfig vis = good;
  vis.mode = RunMode::Visibility;
  CHECK_THROWS_WITH_AS(vis.validate(),
                       doctest::Contains("visibility mode sweeps"),
                       std::invalid_argument);

  ScenarioConfig count = good;
  count.sweep.count = 1;
  CHECK_THROWS_WITH_AS(count.validate(), doctest::Contains(">= 2"),
                       std::invalid_argument);
  ScenarioConfig bounds = good;
  bounds.sweep.min = 5.0;
  bounds.sweep.max = 2.0;
  CHECK_THROWS_WITH_AS(bounds.validate(), doctest::Contains("min < max"),
                       std::invalid_argument);
  ScenarioConfig log0 = good;
  log0.sweep.log_spacing = true;  // min = 0
  CHECK_THROWS_WITH_AS(log0.validate(), doctest::Contains("log spacing"),
                       std::invalid_argument);
  ScenarioConfig neg = good;
  neg.sweep.min = -1.0;
  CHECK_THROWS_WITH_AS(neg.validate(), doctest::Contains("non-negative"),
                       std::invalid_argument);

  ScenarioConfig vis0 = good;
  vis0.mode = RunMode::Visibility;
  vis0.sweep.axis = SweepAxis::PumpDuration;
  vis0.sweep.min = 0.0;
  vis0.sweep.max = 1e-12;
  CHECK_THROWS_WITH_AS(vis0.validate(), doctest::Contains("must be positive"),
                       std::invalid_argument);

  ScenarioConfig spec = good;
  spec.spectrum_file = "spectrum.dat";  // method stays auto
  CHECK_THROWS_WITH_AS(spec.validate(),
                       doctest::Contains("autocorr or nofilter"),
                       std::invalid_argument);

  ScenarioConfig grid = good;
  grid.mode = RunMode::Grid;
  grid.grid.n_t = 1;
  CHECK_THROWS_WITH_AS(grid.validate(), doctest::Contains("n_t, n_tau >= 2"),
                       std::invalid_argument);
  ScenarioConfig ana = good;
  ana.mode = RunMode::Grid;
  ana.grid.analytic = true;
  CHECK_THROWS_WITH_AS(ana.validate(), doctest::Contains("explicit window"),
                       std::invalid_argument);
  ScenarioConfig gspec = good;
  gspec.mode = RunMode::Grid;
  gspec.spectrum_file = "spectrum.dat";
  CHECK_THROWS_WITH_AS(gspec.validate(),
                       doctest::Contains("not supported in grid"),
                       std::invalid_argument);

  ScenarioConfig out = good;
  out.output_file.clear();
  CHECK_THROWS_WITH_AS(out.validate(), doctest::Contains("output file"),
                       std::invalid_argument);
}

TEST_CASE("sweep positions: exact endpoints, linear and log spacing") {
  SweepSpec lin{SweepAxis::DelayLength, 0.0, 4.0, 5, false, RhoMethod::Auto};
  const Eigen::VectorXd v = sweep_values(lin);
  REQUIRE(v.size() == 5);
  for (int i = 0; i < 5; ++i) CHECK(v[i] == Approx(double(i)).epsilon(1e-15));
  CHECK(v[0] == 0.0);
  CHECK(v[4] == 4.0);

  SweepSpec lg{SweepAxis::PumpDuration, 1e-14, 1e-11, 7, true, RhoMethod::Auto};
  const Eigen::VectorXd w = sweep_values(lg);
  REQUIRE(w.size() == 7);
  CHECK(w[0] == 1e-14);
  CHECK(w[6] == 1e-11);
  const double ratio = w[1] / w[0];
  for (int i = 1; i < 6; ++i)
    CHECK(w[i + 1] / w[i] == Approx(ratio).epsilon(1e-12));
}

TEST_CASE("preset catalogue") {
  CHECK(preset_names().size() == 8);
  CHECK_THROWS_WITH_AS(preset_scenarios("fig9"),
                       doctest::Contains("unknown preset 'fig9'"),
                       std::invalid_argument);
  std::vector<std::string> outputs;
  for (const std::string& name : preset_names()) {
    const std::vector<ScenarioConfig> scenarios = preset_scenarios(name);
    CHECK(!scenarios.empty());
    for (const ScenarioConfig& s : scenarios) {
      CHECK_NOTHROW(s.validate());
      outputs.push_back(s.output_file);
    }
  }
  std::sort(outputs.begin(), outputs.end());
  CHECK(std::adjacent_find(outputs.begin(), outputs.end()) == outputs.end());
}

TEST_CASE("runs are deterministic across repeats and thread counts") {
  const ScenarioConfig cfg = parse_str(
      "mode = dip\n"
      "[crystal]\n"
      "L_mm = 3\n"
      "inv_vp_s_per_mm = 57.05e-13\n"
      "inv_v1_s_per_mm = 56.2e-13\n"
      "inv_v2_s_per_mm = 54.26e-13\n"
      "Dp_s2_per_mm = 1e-25\n"
      "[pump]\n"
      "tau_Di_s = 1.55e-13\n"
      "[delay]\n"
      "inv_g1_s_per_mm = 51.81e-13\n"
      "inv_g2_s_per_mm = 52.08e-13\n"
      "[filters]\n"
      "sigma1_nm = 50\n"
      "sigma2_nm = 50\n"
      "[sweep]\n"
      "min = 6\n"
      "max = 16\n"
      "count = 5\n");
  const ScenarioResult r1 = run_scenario(cfg, 1);
  const ScenarioResult r2 = run_scenario(cfg, 1);
  const ScenarioResult r3 = run_scenario(cfg, 3);
  REQUIRE(r1.dip.samples.size() == 5);
  CHECK(r1.all_converged);
  CHECK(r1.dip.samples.front().l_mm == 6.0);
  CHECK(r1.dip.samples.back().l_mm == 16.0);
  for (const DipSample& s : r1.dip.samples)
    CHECK(s.rn == Approx(1.0 - s.rho).epsilon(1e-15));
  const std::string s1 = result_text(cfg, r1);
  CHECK(s1 == result_text(cfg, r2));
  CHECK(s1 == result_text(cfg, r3));
  CHECK(s1.find("l_mm,dtau_l_s,rho,Rn,rel_err,converged") != std::string::npos);
}

TEST_CASE("visibility mode finds the dip center per pump duration") {
  ScenarioConfig cfg = parse_str(kMinimalIni);
  cfg.mode = RunMode::Visibility;
  cfg.sweep.axis = SweepAxis::PumpDuration;
  cfg.sweep.min = 1.55e-13;
  cfg.sweep.max = 5e-13;
  cfg.sweep.count = 2;
  cfg.validate();
  const ScenarioResult r = run_scenario(cfg, 1);
  REQUIRE(r.visibility.size() == 2);
  CHECK(r.all_converged);
  const VisibilitySample& a = r.visibility[0];
  const VisibilitySample& b = r.visibility[1];
  CHECK(a.tau_Di == 1.55e-13);
  // Walk-off compensation point: tau_l = DL/2 at l = 10.78 mm.
  CHECK(a.l_opt_mm == Approx(10.7778).epsilon(1e-2));
  CHECK(a.rho_max == Approx(0.35565).epsilon(1e-3));
  CHECK(a.vis == Approx(visibility(a.rho_max)).epsilon(1e-12));
  // Longer pumps raise the visibility toward the cw limit.
  CHECK(b.vis > a.vis);
  const std::string text = result_text(cfg, r);
  CHECK(text.find("tau_Di_s,l_opt_mm,rho_max,visibility,converged") !=
        std::string::npos);
}

TEST_CASE("grid mode with an explicit window and the analytic kernel") {
  std::string ini(kMinimalIni);
  ini.replace(0, 0, "mode = grid\n");
  const ScenarioConfig cfg = parse_str(
      ini +
      "[grid]\n"
      "n_t = 8\n"
      "n_tau = 9\n"
      "t_min_s = -8e-13\n"
      "t_max_s = 8e-13\n"
      "tau_min_s = -1e-13\n"
      "tau_max_s = 7e-13\n"
      "analytic = true\n");
  const ScenarioResult r = run_scenario(cfg, 1);
  REQUIRE(r.grid.values.rows() == 8);
  REQUIRE(r.grid.values.cols() == 9);
  CHECK(r.all_converged);
  CHECK(r.grid.t_axis[0] == -8e-13);
  CHECK(r.grid.t_axis[7] == 8e-13);
  // l = 0: the pair amplitude lives on 0 < tau < DL = 5.82e-13 only.
  CHECK(r.grid.values.col(0).cwiseAbs().maxCoeff() == 0.0);   // tau = -1e-13
  CHECK(r.grid.values.col(8).cwiseAbs().maxCoeff() == 0.0);   // tau = +7e-13
  CHECK(r.grid.values.col(4).cwiseAbs().maxCoeff() > 0.0);    // tau = 3e-13
  const std::string text = result_text(cfg, r);
  CHECK(text.find("# n_t = 8") != std::string::npos);
  CHECK(text.find("t_axis_s =") != std::string::npos);
  CHECK(text.find("tau_axis_s =") != std::string::npos);
}

TEST_CASE("scenario files and tabulated spectra load from disk") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path();
  const fs::path spec_path = dir / "spdc_test_spectrum.dat";
  const fs::path ini_path = dir / "spdc_test_scan.ini";

  {
    PumpPulse p{1.55e-13, 0.0};
    std::ofstream spec(spec_path);
    spec << "# Omega_rad_s re im\n";
    for (int i = 0; i < 201; ++i) {
      const double om = -5e13 + 1e14 * i / 200.0;
      const Complex v = pump_spectrum(p, om);
      spec << format_double(om) << ' ' << format_double(v.real()) << ' '
           << format_double(v.imag()) << "\n";
    }
  }
  {
    std::ofstream ini(ini_path);
    ini << "mode = dip\n"
        << "[crystal]\n"
        << "L_mm = 3\n"
        << "inv_vp_s_per_mm = 57.05e-13\n"
        << "inv_v1_s_per_mm = 56.2e-13\n"
        << "inv_v2_s_per_mm = 54.26e-13\n"
        << "Dp_s2_per_mm = 1e-25\n"
        << "[pump]\n"
        << "tau_Di_s = 1.55e-13\n"
        << "spectrum_file = " << spec_path.string() << "\n"
        << "[delay]\n"
        << "inv_g1_s_per_mm = 51.81e-13\n"
        << "inv_g2_s_per_mm = 52.08e-13\n"
        << "[filters]\n"
        << "sigma1_nm = 50\n"
        << "sigma2_nm = 50\n"
        << "[sweep]\n"
        << "method = autocorr\n"
        << "min = 8\n"
        << "max = 13\n"
        << "count = 3\n";
  }

  const ScenarioConfig cfg = load_scenario(ini_path.string());
  CHECK(cfg.name == ini_path.string());
  CHECK(cfg.spectrum_file == spec_path.string());
  CHECK(cfg.sweep.method == RhoMethod::Autocorr);
  const ScenarioResult r = run_scenario(cfg, 1);
  REQUIRE(r.dip.samples.size() == 3);
  CHECK(r.all_converged);
  // The run must match calling the table route directly with the same table.
  const PumpSpectrumTable table = PumpSpectrumTable::load(spec_path.string());
  for (const DipSample& s : r.dip.samples) {
    const RhoResult direct = rho_autocorr(table, cfg.setup, s.l_mm, cfg.quad);
    CHECK(s.rho == Approx(direct.rho).epsilon(1e-12));
  }

  fs::remove(spec_path);
  fs::remove(ini_path);
}

}  // TEST_SUITE
