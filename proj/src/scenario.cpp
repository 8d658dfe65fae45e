#include "spdc/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include "spdc/autocorr.hpp"
#include "spdc/io.hpp"

namespace spdc {

namespace {

struct Entry {
  int line = 0;
  std::string section;
  std::string key;
  std::string value;
  bool consumed = false;
};

std::string trim(const std::string& s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

[[noreturn]] void fail_at(const std::string& name, int line,
                          const std::string& msg) {
  throw std::invalid_argument(name + ":" + std::to_string(line) + ": " + msg);
}

[[noreturn]] void fail(const std::string& name, const std::string& msg) {
  throw std::invalid_argument(name + ": " + msg);
}

class EntryTable {
 public:
  EntryTable(std::vector<Entry> entries, std::string name)
      : entries_(std::move(entries)), name_(std::move(name)) {}

  // Returns the entry for [section] key, or nullptr; duplicate keys are an
  // error reported at the second occurrence.
  const Entry* find(const std::string& section, const std::string& key) {
    Entry* hit = nullptr;
    for (Entry& e : entries_) {
      if (e.section != section || e.key != key) continue;
      if (hit != nullptr)
        fail_at(name_, e.line,
                "duplicate key '" + key + "' in [" + section + "]");
      e.consumed = true;
      hit = &e;
    }
    return hit;
  }

  double get_double(const std::string& section, const std::string& key,
                    double fallback) {
    const Entry* e = find(section, key);
    return e == nullptr ? fallback : parse_double(*e);
  }

  double require_double(const std::string& section, const std::string& key) {
    const Entry* e = find(section, key);
    if (e == nullptr)
      fail(name_, "[" + section + "] missing required key '" + key + "'");
    return parse_double(*e);
  }

  int get_int(const std::string& section, const std::string& key,
              int fallback) {
    const Entry* e = find(section, key);
    if (e == nullptr) return fallback;
    errno = 0;
    char* end = nullptr;
    const long v = std::strtol(e->value.c_str(), &end, 10);
    if (end == e->value.c_str() || *end != '\0' || errno == ERANGE ||
        v < std::numeric_limits<int>::min() ||
        v > std::numeric_limits<int>::max())
      fail_at(name_, e->line, "expected an integer for '" + key + "', got '" +
                                  e->value + "'");
    return static_cast<int>(v);
  }

  bool get_bool(const std::string& section, const std::string& key,
                bool fallback) {
    const Entry* e = find(section, key);
    if (e == nullptr) return fallback;
    if (e->value == "true" || e->value == "1") return true;
    if (e->value == "false" || e->value == "0") return false;
    fail_at(name_, e->line,
            "expected true/false for '" + key + "', got '" + e->value + "'");
  }

  std::string get_string(const std::string& section, const std::string& key,
                         const std::string& fallback) {
    const Entry* e = find(section, key);
    return e == nullptr ? fallback : e->value;
  }

  void reject_unconsumed() const {
    for (const Entry& e : entries_) {
      if (!e.consumed)
        fail_at(name_, e.line,
                "unknown key '" + e.key + "' in [" + e.section + "]");
    }
  }

  const std::string& name() const { return name_; }

 private:
  double parse_double(const Entry& e) {
    if (e.value == "inf") return std::numeric_limits<double>::infinity();
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(e.value.c_str(), &end);
    if (end == e.value.c_str() || *end != '\0' || errno == ERANGE)
      fail_at(name_, e.line,
              "expected a number for '" + e.key + "', got '" + e.value + "'");
    return v;
  }

  std::vector<Entry> entries_;
  std::string name_;
};

const std::vector<std::string>& known_sections() {
  static const std::vector<std::string> s = {
      "",       "crystal", "pump",       "delay", "filters",
      "centers", "sweep",   "quadrature", "grid",  "output"};
  return s;
}

RhoMethod parse_method(const std::string& v, const std::string& name,
                       int line) {
  if (v == "auto") return RhoMethod::Auto;
  if (v == "numeric") return RhoMethod::Numeric;
  if (v == "analytic") return RhoMethod::Analytic;
  if (v == "autocorr") return RhoMethod::Autocorr;
  if (v == "nofilter") return RhoMethod::NoFilter;
  fail_at(name, line,
          "unknown method '" + v +
              "' (expected auto, numeric, analytic, autocorr or nofilter)");
}

// One filter width from either an explicit angular width or a wavelength
// FWHM converted at the beam's central wavelength.
double filter_sigma(EntryTable& t, const char* key_rad, const char* key_nm,
                    double lambda0_nm) {
  const Entry* rad = t.find("filters", key_rad);
  const Entry* nm = t.find("filters", key_nm);
  if (rad != nullptr && nm != nullptr)
    fail_at(t.name(), nm->line,
            std::string("give either '") + key_rad + "' or '" + key_nm +
                "', not both");
  if (rad != nullptr) {
    char* end = nullptr;
    const double v = rad->value == "inf"
                         ? std::numeric_limits<double>::infinity()
                         : std::strtod(rad->value.c_str(), &end);
    if (rad->value != "inf" && (end == rad->value.c_str() || *end != '\0'))
      fail_at(t.name(), rad->line,
              std::string("expected a number for '") + key_rad + "'");
    return v;
  }
  if (nm != nullptr) {
    char* end = nullptr;
    const double v = nm->value == "inf"
                         ? std::numeric_limits<double>::infinity()
                         : std::strtod(nm->value.c_str(), &end);
    if (nm->value != "inf" && (end == nm->value.c_str() || *end != '\0'))
      fail_at(t.name(), nm->line,
              std::string("expected a number for '") + key_nm + "'");
    return filter_width_from_wavelength(v, lambda0_nm);
  }
  return kNoFilter;
}

}  // namespace

void ScenarioConfig::validate() const {
  setup.validate();
  quad.validate();
  detail::require(!output_file.empty(), "scenario: output file must be set");
  switch (mode) {
    case RunMode::Dip:
      detail::require(sweep.axis == SweepAxis::DelayLength,
                      "scenario: dip mode sweeps axis = l");
      break;
    case RunMode::Visibility:
      detail::require(sweep.axis == SweepAxis::PumpDuration,
                      "scenario: visibility mode sweeps axis = tau_Di");
      break;
    case RunMode::Grid:
      detail::require(grid.n_t >= 2 && grid.n_tau >= 2,
                      "scenario: grid needs n_t, n_tau >= 2");
      if (grid.explicit_window) {
        detail::require(
            grid.t_min < grid.t_max && grid.tau_min < grid.tau_max,
            "scenario: grid window must have t_min < t_max and "
            "tau_min < tau_max");
      } else {
        detail::require(!grid.analytic,
                        "scenario: analytic grids need an explicit window "
                        "(t_min_s/t_max_s/tau_min_s/tau_max_s)");
      }
      detail::require(spectrum_file.empty(),
                      "scenario: tabulated spectra are not supported in grid "
                      "mode");
      return;  // sweep spec unused
  }
  detail::require(sweep.count >= 2, "scenario: sweep count must be >= 2");
  detail::require(std::isfinite(sweep.min) && std::isfinite(sweep.max) &&
                      sweep.min < sweep.max,
                  "scenario: sweep needs min < max");
  if (sweep.log_spacing)
    detail::require(sweep.min > 0.0,
                    "scenario: log spacing needs positive bounds");
  if (sweep.axis == SweepAxis::DelayLength)
    detail::require(sweep.min >= 0.0,
                    "scenario: delay-line lengths are non-negative");
  else
    detail::require(sweep.min > 0.0,
                    "scenario: pump durations must be positive");
  if (!spectrum_file.empty()) {
    detail::require(mode == RunMode::Dip,
                    "scenario: tabulated spectra are supported in dip mode "
                    "only");
    detail::require(sweep.method == RhoMethod::Autocorr ||
                        sweep.method == RhoMethod::NoFilter,
                    "scenario: tabulated spectra need method = autocorr or "
                    "nofilter");
  }
}

Eigen::VectorXd sweep_values(const SweepSpec& sweep) {
  Eigen::VectorXd v(sweep.count);
  if (sweep.log_spacing) {
    const double la = std::log(sweep.min), lb = std::log(sweep.max);
    for (int i = 0; i < sweep.count; ++i)
      v[i] = std::exp(la + (lb - la) * i / (sweep.count - 1));
    v[0] = sweep.min;
    v[sweep.count - 1] = sweep.max;
  } else {
    for (int i = 0; i < sweep.count; ++i)
      v[i] = sweep.min + (sweep.max - sweep.min) * i / (sweep.count - 1);
    v[sweep.count - 1] = sweep.max;
  }
  return v;
}

ScenarioConfig parse_scenario(std::istream& in, const std::string& name) {
  std::vector<Entry> entries;
  std::string section;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        fail_at(name, line_no, "malformed section header '" + line + "'");
      section = trim(line.substr(1, line.size() - 2));
      if (std::find(known_sections().begin(), known_sections().end(),
                    section) == known_sections().end())
        fail_at(name, line_no, "unknown section [" + section + "]");
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      fail_at(name, line_no, "expected 'key = value', got '" + line + "'");
    Entry e;
    e.line = line_no;
    e.section = section;
    e.key = trim(line.substr(0, eq));
    e.value = trim(line.substr(eq + 1));
    if (e.key.empty()) fail_at(name, line_no, "empty key");
    if (e.value.empty())
      fail_at(name, line_no, "empty value for key '" + e.key + "'");
    entries.push_back(std::move(e));
  }

  EntryTable t(std::move(entries), name);
  ScenarioConfig cfg;
  cfg.name = name;

  const std::string mode = t.get_string("", "mode", "dip");
  if (mode == "dip") {
    cfg.mode = RunMode::Dip;
  } else if (mode == "visibility") {
    cfg.mode = RunMode::Visibility;
  } else if (mode == "grid") {
    cfg.mode = RunMode::Grid;
  } else {
    fail(name, "unknown mode '" + mode +
                   "' (expected dip, visibility or grid)");
  }

  CrystalParams& c = cfg.setup.crystal;
  c.length_L = t.require_double("crystal", "L_mm");
  c.inv_vp = t.require_double("crystal", "inv_vp_s_per_mm");
  c.inv_v1 = t.require_double("crystal", "inv_v1_s_per_mm");
  c.inv_v2 = t.require_double("crystal", "inv_v2_s_per_mm");
  c.Dp = t.get_double("crystal", "Dp_s2_per_mm", 0.0);
  c.D1 = t.get_double("crystal", "D1_s2_per_mm", 0.0);
  c.D2 = t.get_double("crystal", "D2_s2_per_mm", 0.0);

  cfg.setup.pump_in.tau_D = t.require_double("pump", "tau_Di_s");
  cfg.setup.pump_in.chirp_a = t.get_double("pump", "chirp_ai", 0.0);
  cfg.spectrum_file = t.get_string("pump", "spectrum_file", "");

  DelayLine& d = cfg.setup.delay;
  d.inv_g1 = t.require_double("delay", "inv_g1_s_per_mm");
  d.inv_g2 = t.require_double("delay", "inv_g2_s_per_mm");
  d.d1 = t.get_double("delay", "d1_s2_per_mm", 0.0);
  d.d2 = t.get_double("delay", "d2_s2_per_mm", 0.0);
  d.length_l = t.get_double("delay", "l_mm", 0.0);

  const double lp = t.get_double("centers", "lambda_p_nm", 397.5);
  const double l1 = t.get_double("centers", "lambda1_nm", 795.0);
  const double l2 = t.get_double("centers", "lambda2_nm", 795.0);
  cfg.setup.centers = CentralFrequencies::from_wavelengths_nm(lp, l1, l2);

  cfg.setup.filters.sigma1 = filter_sigma(t, "sigma1_rad_s", "sigma1_nm", l1);
  cfg.setup.filters.sigma2 = filter_sigma(t, "sigma2_rad_s", "sigma2_nm", l2);

  const Entry* axis = t.find("sweep", "axis");
  if (axis != nullptr) {
    if (axis->value == "l")
      cfg.sweep.axis = SweepAxis::DelayLength;
    else if (axis->value == "tau_Di")
      cfg.sweep.axis = SweepAxis::PumpDuration;
    else
      fail_at(name, axis->line, "unknown sweep axis '" + axis->value +
                                    "' (expected l or tau_Di)");
  } else if (cfg.mode == RunMode::Visibility) {
    cfg.sweep.axis = SweepAxis::PumpDuration;
  }
  cfg.sweep.min = t.get_double("sweep", "min", cfg.sweep.min);
  cfg.sweep.max = t.get_double("sweep", "max", cfg.sweep.max);
  cfg.sweep.count = t.get_int("sweep", "count", cfg.sweep.count);
  const Entry* spacing = t.find("sweep", "spacing");
  if (spacing != nullptr) {
    if (spacing->value == "linear")
      cfg.sweep.log_spacing = false;
    else if (spacing->value == "log")
      cfg.sweep.log_spacing = true;
    else
      fail_at(name, spacing->line, "unknown spacing '" + spacing->value +
                                       "' (expected linear or log)");
  }
  const Entry* method = t.find("sweep", "method");
  if (method != nullptr)
    cfg.sweep.method = parse_method(method->value, name, method->line);

  cfg.grid.n_t = t.get_int("grid", "n_t", static_cast<int>(cfg.grid.n_t));
  cfg.grid.n_tau =
      t.get_int("grid", "n_tau", static_cast<int>(cfg.grid.n_tau));
  const Entry* tmin = t.find("grid", "t_min_s");
  const Entry* tmax = t.find("grid", "t_max_s");
  const Entry* umin = t.find("grid", "tau_min_s");
  const Entry* umax = t.find("grid", "tau_max_s");
  const int have = (tmin != nullptr) + (tmax != nullptr) + (umin != nullptr) +
                   (umax != nullptr);
  if (have != 0) {
    if (have != 4)
      fail(name,
           "[grid] window needs all of t_min_s, t_max_s, tau_min_s, "
           "tau_max_s");
    cfg.grid.explicit_window = true;
    cfg.grid.t_min = t.get_double("grid", "t_min_s", 0.0);
    cfg.grid.t_max = t.get_double("grid", "t_max_s", 0.0);
    cfg.grid.tau_min = t.get_double("grid", "tau_min_s", 0.0);
    cfg.grid.tau_max = t.get_double("grid", "tau_max_s", 0.0);
  }
  cfg.grid.analytic = t.get_bool("grid", "analytic", false);

  cfg.quad.base_order = t.get_int("quadrature", "order", cfg.quad.base_order);
  cfg.quad.rel_tol = t.get_double("quadrature", "tol", cfg.quad.rel_tol);
  cfg.quad.max_refinements =
      t.get_int("quadrature", "max_refine", cfg.quad.max_refinements);

  cfg.output_file = t.get_string("output", "file", cfg.output_file);

  t.reject_unconsumed();
  cfg.validate();
  return cfg;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  detail::require(in.good(), "cannot open scenario file: " + path);
  return parse_scenario(in, path);
}

namespace {

DipCurve dip_scan_table(const PumpSpectrumTable& table,
                        const SetupConfig& setup,
                        const Eigen::VectorXd& l_values,
                        const QuadratureConfig& cfg, RhoMethod method) {
  DipCurve curve;
  curve.setup = setup;
  curve.method = method;
  curve.samples.resize(static_cast<size_t>(l_values.size()));
  for (Eigen::Index i = 0; i < l_values.size(); ++i) {
    const double l = l_values[i];
    const RhoResult r = method == RhoMethod::Autocorr
                            ? rho_autocorr(table, setup, l, cfg)
                            : rho_nofilter(table, setup, l, cfg);
    DipSample& s = curve.samples[static_cast<size_t>(i)];
    SetupConfig at = setup;
    at.delay.length_l = l;
    s.l_mm = l;
    s.dtau_l = at.dtau_l();
    s.rho = r.rho;
    s.rn = 1.0 - r.rho;
    s.rel_err = r.est_rel_error;
    s.converged = r.converged;
    curve.all_converged = curve.all_converged && r.converged;
  }
  return curve;
}

}  // namespace

ScenarioResult run_scenario(const ScenarioConfig& config, int threads) {
  config.validate();
  ScenarioResult result;
  result.mode = config.mode;
  switch (config.mode) {
    case RunMode::Dip: {
      const Eigen::VectorXd ls = sweep_values(config.sweep);
      if (!config.spectrum_file.empty()) {
        const PumpSpectrumTable table =
            PumpSpectrumTable::load(config.spectrum_file);
        result.dip = dip_scan_table(table, config.setup, ls, config.quad,
                                    config.sweep.method);
      } else {
        result.dip = dip_scan(config.setup, ls, config.quad,
                              config.sweep.method, threads);
      }
      result.all_converged = result.dip.all_converged;
      break;
    }
    case RunMode::Visibility: {
      const Eigen::VectorXd taus = sweep_values(config.sweep);
      result.visibility = visibility_vs_duration(
          config.setup, {taus.data(), taus.data() + taus.size()},
          config.quad, config.sweep.method, threads);
      for (const VisibilitySample& s : result.visibility)
        result.all_converged = result.all_converged && s.converged;
      break;
    }
    case RunMode::Grid: {
      if (config.grid.explicit_window) {
        const Eigen::VectorXd t_axis = Eigen::VectorXd::LinSpaced(
            config.grid.n_t, config.grid.t_min, config.grid.t_max);
        const Eigen::VectorXd tau_axis = Eigen::VectorXd::LinSpaced(
            config.grid.n_tau, config.grid.tau_min, config.grid.tau_max);
        result.grid = amplitude_grid(config.setup, t_axis, tau_axis,
                                     config.quad, threads,
                                     config.grid.analytic);
      } else {
        result.grid = overlap_grid(config.setup, config.quad, config.grid.n_t,
                                   config.grid.n_tau, threads);
      }
      result.all_converged = result.grid.all_converged;
      break;
    }
  }
  return result;
}

void write_result(std::ostream& os, const ScenarioConfig& config,
                  const ScenarioResult& result) {
  switch (result.mode) {
    case RunMode::Dip:
      write_dip_csv(os, result.dip);
      break;
    case RunMode::Visibility:
      write_visibility_csv(os, result.visibility, config.setup);
      break;
    case RunMode::Grid:
      write_amplitude_grid(os, result.grid);
      break;
  }
}

}  // namespace spdc
