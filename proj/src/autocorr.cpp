#include "spdc/autocorr.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "spdc/pump.hpp"

namespace spdc {

PumpSpectrumTable PumpSpectrumTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw std::invalid_argument("PumpSpectrumTable: cannot open '" + path +
                                "'");
  return parse(in, path);
}

PumpSpectrumTable PumpSpectrumTable::parse(std::istream& in,
                                           const std::string& name) {
  std::vector<double> om;
  std::vector<Complex> val;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream row(line);
    double w, re, im;
    if (!(row >> w)) continue;  // blank or comment-only line
    if (!(row >> re >> im))
      throw std::invalid_argument(
          name + ":" + std::to_string(lineno) +
          ": expected three columns 'Omega_rad_s re im'");
    om.push_back(w);
    val.emplace_back(re, im);
  }
  PumpSpectrumTable t;
  t.omega = Eigen::Map<Eigen::ArrayXd>(om.data(), om.size());
  t.value = Eigen::Map<Eigen::ArrayXcd>(val.data(), val.size());
  t.validate();
  return t;
}

void PumpSpectrumTable::validate() const {
  detail::require(omega.size() >= 8 && omega.size() == value.size(),
                  "PumpSpectrumTable: need at least 8 rows");
  detail::require(omega.isFinite().all() && value.isFinite().all(),
                  "PumpSpectrumTable: non-finite entries");
  for (Eigen::Index i = 1; i < omega.size(); ++i)
    detail::require(omega[i] > omega[i - 1],
                    "PumpSpectrumTable: Omega must be strictly increasing");
  const double peak = value.abs().maxCoeff();
  detail::require(peak > 0.0, "PumpSpectrumTable: spectrum is identically 0");
  detail::require(std::abs(value[0]) <= 1e-6 * peak &&
                      std::abs(value[value.size() - 1]) <= 1e-6 * peak,
                  "PumpSpectrumTable: spectrum must decay below 1e-6 of its "
                  "peak at the table edges");
}

double PumpSpectrumTable::abs2(double w) const {
  if (w <= omega[0] || w >= omega[omega.size() - 1]) {
    if (w == omega[0]) return std::norm(value[0]);
    if (w == omega[omega.size() - 1]) return std::norm(value[value.size() - 1]);
    return 0.0;
  }
  // Binary search for the enclosing segment, then linear interpolation.
  Eigen::Index lo = 0, hi = omega.size() - 1;
  while (hi - lo > 1) {
    const Eigen::Index mid = (lo + hi) / 2;
    (omega[mid] <= w ? lo : hi) = mid;
  }
  const double f = (w - omega[lo]) / (omega[lo + 1] - omega[lo]);
  return std::norm(value[lo] + f * (value[lo + 1] - value[lo]));
}

Complex gamma_gaussian(const PumpPulse& pump_in, double Dp, double sigma,
                       double z1, double z2, double x) {
  pump_in.validate();
  detail::require(sigma > 0.0, "gamma_gaussian: invalid sigma");
  const double inv_s2 = std::isfinite(sigma) ? 1.0 / (sigma * sigma) : 0.0;
  const double ai = pump_in.chirp_a;
  const Complex psi(2.0 * pump_in.b() + 2.0 * inv_s2,
                    -Dp * (z1 - z2) / (4.0 * kPi));
  const double pref = pump_in.tau_D * pump_in.tau_D /
                      (2.0 * std::sqrt(1.0 + ai * ai));
  return pref * principal_sqrt(kPi / psi) * std::exp(-x * x / (4.0 * psi));
}

Complex gamma_numeric(const PumpPulse& pump_in, double Dp, double L,
                      double sigma, double z1, double z2, double x,
                      const QuadratureConfig& cfg) {
  pump_in.validate();
  detail::require(L > 0.0, "gamma_numeric: invalid crystal length");
  const double zeta1 = z1 + 0.5 * L, zeta2 = z2 + 0.5 * L;
  // Duration scale of each propagated field, from the closed-form Gaussian
  // width |alpha|-based estimate, to size the time window.
  const auto t_scale = [&](double zeta) {
    const double b = pump_in.b();
    const double inv_s2 = std::isfinite(sigma) ? 1.0 / (sigma * sigma) : 0.0;
    const Complex alpha(b + inv_s2,
                        -(b * pump_in.chirp_a + Dp * zeta / (4.0 * kPi)));
    return 2.0 * std::abs(alpha) / std::sqrt(alpha.real());
  };
  const double T = 8.0 * std::max(t_scale(zeta1), t_scale(zeta2)) +
                   std::abs(x);
  const QuadratureResult q = integrate_1d(
      [&](double t) {
        return propagated_filtered_pump(pump_in, Dp, zeta1, sigma, t) *
               std::conj(
                   propagated_filtered_pump(pump_in, Dp, zeta2, sigma, t + x));
      },
      -T, T, cfg);
  return q.value;
}

Complex gamma_table(const PumpSpectrumTable& table, double Dp, double sigma,
                    double z1, double z2, double x) {
  table.validate();
  detail::require(sigma > 0.0, "gamma_table: invalid sigma");
  const double inv_s2 = std::isfinite(sigma) ? 1.0 / (sigma * sigma) : 0.0;
  const double w = z1 - z2;
  const double phase_coef = Dp * w / (4.0 * kPi);
  const auto integrand = [&](double om) {
    return table.abs2(om) *
           std::exp(Complex(-2.0 * inv_s2 * om * om,
                            phase_coef * om * om + om * x));
  };
  // Composite fixed-order rule per tabulated segment: the piecewise-linear
  // interpolation error dominates any quadrature error at this order.
  Complex acc{0.0, 0.0};
  for (Eigen::Index i = 0; i + 1 < table.omega.size(); ++i)
    acc += gl_sum_1d(integrand, table.omega[i], table.omega[i + 1], 12);
  return 2.0 * kPi * acc;
}

namespace {

void require_autocorr_regime(const SetupConfig& setup) {
  setup.validate();
  detail::require(setup.centers.degenerate(),
                  "rho_autocorr: requires degenerate central frequencies");
  detail::require(setup.crystal.D1 == 0.0 && setup.crystal.D2 == 0.0 &&
                      setup.delay.d1 == setup.delay.d2,
                  "rho_autocorr: the autocorrelation representation holds "
                  "for dispersion-free signal/idler propagation (D1 = D2 = "
                  "0, d1 = d2)");
}

// Needle-probing breakpoints for the gamma profile around w = 0.
void add_gamma_breakpoints(const std::function<Complex(double)>& gamma_w,
                           double L, std::vector<double>* bps) {
  const double delta = L / 512.0;
  const double g0 = std::abs(gamma_w(0.0));
  const double gd = std::abs(gamma_w(delta));
  if (g0 > 0.0 && gd > 0.0) {
    const double curv = std::log(g0 / gd) / (delta * delta);
    if (curv > 0.0) {
      const double width = 1.0 / std::sqrt(curv);
      if (width < L / 6.0) {
        bps->push_back(-12.0 * width);
        bps->push_back(12.0 * width);
      }
    }
  }
}

RhoResult rho_autocorr_impl(const std::function<Complex(double)>& gamma_w,
                            const SetupConfig& setup,
                            const QuadratureConfig& cfg) {
  cfg.validate();
  const WalkOff wo = setup.walkoff();
  const double L = setup.crystal.length_L;
  const double dtau = setup.dtau_l();
  const double sigma1 = setup.filters.sigma1;
  const double k = sigma1 * wo.D / 4.0;  // needle constant sigma_B |D| / (4 sqrt2)
  const double s0 = -2.0 * dtau / wo.D;

  // Numerator: s-integral of the Gaussian needle in closed form (erf),
  // leaving a 1-D w-integral with sharp edges where the needle leaves the
  // diamond.
  const double sqrt_pi = std::sqrt(kPi);
  const auto num_integrand = [&](double w) -> Complex {
    const double half_span = L - std::abs(w);
    const double i_s = (0.5 * sqrt_pi / k) *
                       (std::erf(k * (half_span - s0)) +
                        std::erf(k * (half_span + s0)));
    return 0.5 * gamma_w(w) * i_s;
  };
  const auto den_integrand = [&](double w) -> Complex {
    return (L - std::abs(w)) * gamma_w(w) * std::exp(-k * k * w * w);
  };

  std::vector<double> num_bps = {0.0};
  const double edge = L - std::abs(s0);
  if (edge > 0.0 && edge < L) {
    for (double e : {edge, edge - 6.0 / k, edge + 6.0 / k}) {
      num_bps.push_back(e);
      num_bps.push_back(-e);
    }
  }
  std::vector<double> den_bps = {0.0, -12.0 / k, 12.0 / k};
  add_gamma_breakpoints(gamma_w, L, &num_bps);
  add_gamma_breakpoints(gamma_w, L, &den_bps);

  RhoResult out;
  int order = cfg.base_order;
  const auto ratio = [&](int n) {
    const double num = gl_sum_1d(num_integrand, -L, L, n, num_bps).real();
    const double den = gl_sum_1d(den_integrand, -L, L, n, den_bps).real();
    detail::require(den > 0.0, "rho_autocorr: background must be positive");
    return num / den;
  };
  double rho_prev = ratio(order);
  out.rho = rho_prev;
  out.converged = false;
  for (int j = 1; j <= cfg.max_refinements; ++j) {
    order *= 2;
    const double rho_j = ratio(order);
    out.rho = rho_j;
    out.refinements_used = j;
    out.est_rel_error =
        std::abs(rho_j - rho_prev) / std::max(std::abs(rho_j), 0.01);
    if (out.est_rel_error <= cfg.rel_tol) {
      out.converged = true;
      break;
    }
    rho_prev = rho_j;
  }
  return out;
}

RhoResult rho_nofilter_impl(const std::function<Complex(double)>& gamma_w,
                            const SetupConfig& setup,
                            const QuadratureConfig& cfg) {
  cfg.validate();
  const WalkOff wo = setup.walkoff();
  const double L = setup.crystal.length_L;
  const double W = L - 2.0 * std::abs(setup.dtau_l()) / wo.D;
  if (W <= 0.0) return {0.0, 0.0, true, 0};
  const double g0 = gamma_w(0.0).real();
  detail::require(g0 > 0.0, "rho_nofilter: gamma(0) must be positive");
  std::vector<double> bps;
  add_gamma_breakpoints(gamma_w, L, &bps);
  const QuadratureResult q =
      integrate_1d(gamma_w, -W, W, cfg, bps, 2.0 * g0 * L);
  return {q.value.real() / (2.0 * g0 * L), q.est_rel_error, q.converged,
          q.refinements_used};
}

SetupConfig setup_at(const SetupConfig& setup, double l_mm) {
  detail::require(std::isfinite(l_mm) && l_mm >= 0.0,
                  "rho: delay-line length must be non-negative");
  SetupConfig s = setup;
  s.delay.length_l = l_mm;
  return s;
}

}  // namespace

RhoResult rho_autocorr(const SetupConfig& setup_in, double l_mm,
                       const QuadratureConfig& cfg) {
  const SetupConfig setup = setup_at(setup_in, l_mm);
  require_autocorr_regime(setup);
  detail::require(setup.filters.finite() &&
                      setup.filters.sigma1 == setup.filters.sigma2,
                  "rho_autocorr: requires equal finite filters");
  const double sigma_b = std::sqrt(2.0) * setup.filters.sigma1;
  const PumpPulse pump = setup.pump_in;
  const double Dp = setup.crystal.Dp;
  const double lambda = setup.walkoff().Lambda;
  const auto gamma_w = [&](double w) {
    return gamma_gaussian(pump, Dp, sigma_b, 0.5 * w, -0.5 * w, lambda * w);
  };
  return rho_autocorr_impl(gamma_w, setup, cfg);
}

RhoResult rho_autocorr(const PumpSpectrumTable& table,
                       const SetupConfig& setup_in, double l_mm,
                       const QuadratureConfig& cfg) {
  const SetupConfig setup = setup_at(setup_in, l_mm);
  require_autocorr_regime(setup);
  detail::require(setup.filters.finite() &&
                      setup.filters.sigma1 == setup.filters.sigma2,
                  "rho_autocorr: requires equal finite filters");
  const double sigma_b = std::sqrt(2.0) * setup.filters.sigma1;
  const double Dp = setup.crystal.Dp;
  const double lambda = setup.walkoff().Lambda;
  const auto gamma_w = [&](double w) {
    return gamma_table(table, Dp, sigma_b, 0.5 * w, -0.5 * w, lambda * w);
  };
  return rho_autocorr_impl(gamma_w, setup, cfg);
}

RhoResult rho_nofilter(const SetupConfig& setup_in, double l_mm,
                       const QuadratureConfig& cfg) {
  const SetupConfig setup = setup_at(setup_in, l_mm);
  require_autocorr_regime(setup);
  detail::require(!setup.filters.any_finite(),
                  "rho_nofilter: valid only without filters (use "
                  "rho_autocorr or rho_numeric with filters)");
  const PumpPulse pump = setup.pump_in;
  const double Dp = setup.crystal.Dp;
  const double lambda = setup.walkoff().Lambda;
  const auto gamma_w = [&](double w) {
    return gamma_gaussian(pump, Dp, kNoFilter, 0.5 * w, -0.5 * w, lambda * w);
  };
  return rho_nofilter_impl(gamma_w, setup, cfg);
}

RhoResult rho_nofilter(const PumpSpectrumTable& table,
                       const SetupConfig& setup_in, double l_mm,
                       const QuadratureConfig& cfg) {
  const SetupConfig setup = setup_at(setup_in, l_mm);
  require_autocorr_regime(setup);
  detail::require(!setup.filters.any_finite(),
                  "rho_nofilter: valid only without filters");
  const double Dp = setup.crystal.Dp;
  const double lambda = setup.walkoff().Lambda;
  const auto gamma_w = [&](double w) {
    return gamma_table(table, Dp, kNoFilter, 0.5 * w, -0.5 * w, lambda * w);
  };
  return rho_nofilter_impl(gamma_w, setup, cfg);
}

}  // namespace spdc
