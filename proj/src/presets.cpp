#include "spdc/presets.hpp"

#include "spdc/io.hpp"

namespace spdc {

namespace {

// BBO type-II source at 397.5 nm -> 795 nm with quartz delay lines.
ScenarioConfig base_scenario() {
  ScenarioConfig cfg;
  cfg.setup.crystal = {3.0,      57.05e-13, 56.2e-13, 54.26e-13,
                       0.0,      0.0,       0.0};
  cfg.setup.pump_in = {1.55e-13, 0.0};
  cfg.setup.delay = {51.81e-13, 52.08e-13, 0.0, 0.0, 0.0};
  cfg.setup.filters = FilterPair::none();
  return cfg;
}

double sigma_nm(double fwhm_nm) {
  return filter_width_from_wavelength(fwhm_nm, 795.0);
}

ScenarioConfig dip_base(double sigma_rad_s, double l_max, int count) {
  ScenarioConfig cfg = base_scenario();
  cfg.mode = RunMode::Dip;
  cfg.setup.filters = {sigma_rad_s, sigma_rad_s};
  cfg.sweep.axis = SweepAxis::DelayLength;
  cfg.sweep.min = 0.0;
  cfg.sweep.max = l_max;
  cfg.sweep.count = count;
  return cfg;
}

std::vector<ScenarioConfig> fig2() {
  ScenarioConfig cfg = base_scenario();
  cfg.name = "fig2";
  cfg.mode = RunMode::Visibility;
  cfg.sweep.axis = SweepAxis::PumpDuration;
  cfg.sweep.min = 2e-14;
  cfg.sweep.max = 1e-11;
  cfg.sweep.count = 40;
  cfg.sweep.log_spacing = true;
  cfg.output_file = "fig2_visibility.csv";
  return {cfg};
}

std::vector<ScenarioConfig> fig3() {
  ScenarioConfig cfg = base_scenario();
  cfg.name = "fig3";
  cfg.mode = RunMode::Grid;
  cfg.setup.crystal.Dp = 1e-25;
  cfg.setup.filters = {sigma_nm(100.0), sigma_nm(100.0)};
  cfg.grid.n_t = 121;
  cfg.grid.n_tau = 121;
  cfg.output_file = "fig3_amplitude.csv";
  return {cfg};
}

std::vector<ScenarioConfig> fig4a() {
  std::vector<ScenarioConfig> out;
  const double dps[] = {0.0, 5e-26, 1e-25, 3e-25};
  const char* files[] = {"fig4a_Dp0.csv", "fig4a_Dp5e-26.csv",
                         "fig4a_Dp1e-25.csv", "fig4a_Dp3e-25.csv"};
  for (int i = 0; i < 4; ++i) {
    ScenarioConfig cfg = dip_base(sigma_nm(50.0), 25.0, 126);
    cfg.name = "fig4a Dp=" + format_double(dps[i]);
    cfg.setup.crystal.Dp = dps[i];
    cfg.output_file = files[i];
    out.push_back(cfg);
  }
  return out;
}

std::vector<ScenarioConfig> fig4b() {
  std::vector<ScenarioConfig> out;
  const double ais[] = {0.0, 2.0};
  const char* files[] = {"fig4b_ai0.csv", "fig4b_ai2.csv"};
  for (int i = 0; i < 2; ++i) {
    ScenarioConfig cfg = dip_base(sigma_nm(50.0), 25.0, 126);
    cfg.name = "fig4b ai=" + format_double(ais[i]);
    cfg.setup.crystal.Dp = 5e-26;
    cfg.setup.pump_in.chirp_a = ais[i];
    cfg.output_file = files[i];
    out.push_back(cfg);
  }
  return out;
}

std::vector<ScenarioConfig> fig5() {
  std::vector<ScenarioConfig> out;
  for (int i = 0; i < 2; ++i) {
    ScenarioConfig cfg = dip_base(sigma_nm(50.0), 25.0, 126);
    cfg.name = i == 0 ? "fig5 D1=1e-25" : "fig5 D2=1e-25";
    (i == 0 ? cfg.setup.crystal.D1 : cfg.setup.crystal.D2) = 1e-25;
    cfg.output_file = i == 0 ? "fig5_D1.csv" : "fig5_D2.csv";
    out.push_back(cfg);
  }
  return out;
}

std::vector<ScenarioConfig> fig6() {
  std::vector<ScenarioConfig> out;
  const double ds[] = {0.0, 1e-26, 5e-26, 1e-25};
  const char* files[] = {"fig6_d0.csv", "fig6_d1e-26.csv", "fig6_d5e-26.csv",
                         "fig6_d1e-25.csv"};
  for (int i = 0; i < 4; ++i) {
    ScenarioConfig cfg = dip_base(sigma_nm(50.0), 40.0, 161);
    cfg.name = "fig6 d1=" + format_double(ds[i]);
    cfg.setup.delay.d1 = ds[i];
    cfg.output_file = files[i];
    out.push_back(cfg);
  }
  return out;
}

std::vector<ScenarioConfig> fig7() {
  ScenarioConfig cfg = base_scenario();
  cfg.name = "fig7";
  cfg.mode = RunMode::Grid;
  cfg.setup.delay.d1 = 1e-25;
  cfg.setup.delay.d2 = 1e-25;
  cfg.setup.delay.length_l = 25.0;
  cfg.setup.filters = {sigma_nm(100.0), sigma_nm(100.0)};
  cfg.grid.n_t = 121;
  cfg.grid.n_tau = 121;
  cfg.output_file = "fig7_amplitude.csv";
  return {cfg};
}

std::vector<ScenarioConfig> fig8() {
  std::vector<ScenarioConfig> out;
  const double taus[] = {1.55e-13, 5e-13, 1e-11, 1.55e-13};
  const double ds[] = {5e-26, 5e-26, 5e-26, 0.0};
  const char* files[] = {"fig8_tau1.55e-13.csv", "fig8_tau5e-13.csv",
                         "fig8_tau1e-11.csv", "fig8_reference_d0.csv"};
  for (int i = 0; i < 4; ++i) {
    ScenarioConfig cfg = dip_base(sigma_nm(50.0), 40.0, 161);
    cfg.name = "fig8 tau_Di=" + format_double(taus[i]) +
               " d1=" + format_double(ds[i]);
    cfg.setup.pump_in.tau_D = taus[i];
    cfg.setup.delay.d1 = ds[i];
    cfg.output_file = files[i];
    out.push_back(cfg);
  }
  return out;
}

}  // namespace

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {
      "fig2", "fig3", "fig4a", "fig4b", "fig5", "fig6", "fig7", "fig8"};
  return names;
}

std::vector<ScenarioConfig> preset_scenarios(const std::string& name) {
  if (name == "fig2") return fig2();
  if (name == "fig3") return fig3();
  if (name == "fig4a") return fig4a();
  if (name == "fig4b") return fig4b();
  if (name == "fig5") return fig5();
  if (name == "fig6") return fig6();
  if (name == "fig7") return fig7();
  if (name == "fig8") return fig8();
  std::string msg = "unknown preset '" + name + "'; available:";
  for (const std::string& n : preset_names()) msg += " " + n;
  throw std::invalid_argument(msg);
}

}  // namespace spdc
