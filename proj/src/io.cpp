#include "spdc/io.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>

namespace spdc {

namespace {

std::ofstream open_or_throw(const std::string& path) {
  std::ofstream os(path);
  detail::require(os.good(), "cannot open output file: " + path);
  return os;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

const char* to_string(RhoMethod method) {
  switch (method) {
    case RhoMethod::Auto: return "auto";
    case RhoMethod::Numeric: return "numeric";
    case RhoMethod::Analytic: return "analytic";
    case RhoMethod::Autocorr: return "autocorr";
    case RhoMethod::NoFilter: return "nofilter";
  }
  return "auto";
}

void write_setup_header(std::ostream& os, const SetupConfig& setup) {
  const auto kv = [&os](const char* key, double v) {
    os << "# " << key << " = " << format_double(v) << "\n";
  };
  kv("L_mm", setup.crystal.length_L);
  kv("inv_vp_s_per_mm", setup.crystal.inv_vp);
  kv("inv_v1_s_per_mm", setup.crystal.inv_v1);
  kv("inv_v2_s_per_mm", setup.crystal.inv_v2);
  kv("Dp_s2_per_mm", setup.crystal.Dp);
  kv("D1_s2_per_mm", setup.crystal.D1);
  kv("D2_s2_per_mm", setup.crystal.D2);
  kv("tau_Di_s", setup.pump_in.tau_D);
  kv("chirp_ai", setup.pump_in.chirp_a);
  kv("inv_g1_s_per_mm", setup.delay.inv_g1);
  kv("inv_g2_s_per_mm", setup.delay.inv_g2);
  kv("d1_s2_per_mm", setup.delay.d1);
  kv("d2_s2_per_mm", setup.delay.d2);
  kv("l_mm", setup.delay.length_l);
  kv("sigma1_rad_s", setup.filters.sigma1);
  kv("sigma2_rad_s", setup.filters.sigma2);
  kv("omega_p_rad_s", setup.centers.omega_p);
  kv("omega1_rad_s", setup.centers.omega_1);
  kv("omega2_rad_s", setup.centers.omega_2);
}

void write_dip_csv(std::ostream& os, const DipCurve& curve) {
  write_setup_header(os, curve.setup);
  os << "# method = " << to_string(curve.method) << "\n";
  os << "l_mm,dtau_l_s,rho,Rn,rel_err,converged\n";
  for (const DipSample& s : curve.samples) {
    os << format_double(s.l_mm) << ',' << format_double(s.dtau_l) << ','
       << format_double(s.rho) << ',' << format_double(s.rn) << ','
       << format_double(s.rel_err) << ',' << (s.converged ? 1 : 0) << "\n";
  }
}

void write_dip_csv(const std::string& path, const DipCurve& curve) {
  auto os = open_or_throw(path);
  write_dip_csv(os, curve);
}

void write_visibility_csv(std::ostream& os,
                          const std::vector<VisibilitySample>& rows,
                          const SetupConfig& setup) {
  write_setup_header(os, setup);
  os << "tau_Di_s,l_opt_mm,rho_max,visibility,converged\n";
  for (const VisibilitySample& s : rows) {
    os << format_double(s.tau_Di) << ',' << format_double(s.l_opt_mm) << ','
       << format_double(s.rho_max) << ',' << format_double(s.vis) << ','
       << (s.converged ? 1 : 0) << "\n";
  }
}

void write_visibility_csv(const std::string& path,
                          const std::vector<VisibilitySample>& rows,
                          const SetupConfig& setup) {
  auto os = open_or_throw(path);
  write_visibility_csv(os, rows, setup);
}

void write_amplitude_grid(std::ostream& os, const AmplitudeGrid& grid) {
  write_setup_header(os, grid.setup);
  os << "# n_t = " << grid.t_axis.size()
     << "\n# n_tau = " << grid.tau_axis.size() << "\n";
  os << "t_axis_s =";
  for (Eigen::Index i = 0; i < grid.t_axis.size(); ++i)
    os << ' ' << format_double(grid.t_axis[i]);
  os << "\ntau_axis_s =";
  for (Eigen::Index j = 0; j < grid.tau_axis.size(); ++j)
    os << ' ' << format_double(grid.tau_axis[j]);
  os << "\n";
  for (Eigen::Index i = 0; i < grid.t_axis.size(); ++i) {
    for (Eigen::Index j = 0; j < grid.tau_axis.size(); ++j) {
      const Complex v = grid.values(i, j);
      if (j) os << ' ';
      os << format_double(v.real()) << ',' << format_double(v.imag());
    }
    os << "\n";
  }
}

void write_amplitude_grid(const std::string& path, const AmplitudeGrid& grid) {
  auto os = open_or_throw(path);
  write_amplitude_grid(os, grid);
}

}  // namespace spdc
