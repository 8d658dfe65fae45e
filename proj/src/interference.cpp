#include "spdc/interference.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <thread>

#include "spdc/autocorr.hpp"

namespace spdc {

namespace {

// Precomputed coefficients of the rate integrands.  The numerator kernel
// (interference term) and denominator kernel (constant background) share
// the filter/bandwidth constants; only differences of the delay dispersion
// coefficients enter, which is what makes equal d1 = d2 drop out exactly.
struct RhoCoeffs {
  double eps1 = 0.0, eps2 = 0.0;   // 1/sigma_j^2
  double twob = 0.0;               // 2 b
  double qd = 0.0;                 // (d1 - d2) l / 4 pi
  double sl1 = 0.0, sl2 = 0.0;     // (Dp - D_j) / 4 pi
  double slp = 0.0;                // Dp / 4 pi
  double P1 = 0.0, P2 = 0.0;       // 1/vp - 1/v_j
  double tau_l = 0.0;
  double L = 0.0;
  double D = 0.0, Lambda = 0.0;
};

RhoCoeffs make_rho_coeffs(const SetupConfig& setup) {
  const double inv4pi = 1.0 / (4.0 * kPi);
  RhoCoeffs c;
  c.eps1 = setup.filters.inv_sigma1_sq();
  c.eps2 = setup.filters.inv_sigma2_sq();
  c.twob = 2.0 * setup.b();
  c.qd = (setup.delay.d1 - setup.delay.d2) * setup.delay.length_l * inv4pi;
  c.sl1 = (setup.crystal.Dp - setup.crystal.D1) * inv4pi;
  c.sl2 = (setup.crystal.Dp - setup.crystal.D2) * inv4pi;
  c.slp = setup.crystal.Dp * inv4pi;
  c.P1 = setup.crystal.inv_vp - setup.crystal.inv_v1;
  c.P2 = setup.crystal.inv_vp - setup.crystal.inv_v2;
  c.tau_l = setup.tau_l();
  c.L = setup.crystal.length_L;
  const WalkOff wo = setup.walkoff();
  c.D = wo.D;
  c.Lambda = wo.Lambda;
  return c;
}

struct BarKernel {
  Complex beta1, beta2, gamma;
  double c1, c2;
};

BarKernel bar_kernel(const RhoCoeffs& c, double z1, double z2) {
  const double epsbar = c.eps1 + c.eps2;
  BarKernel k;
  k.beta1 = Complex(epsbar + c.twob, -(c.qd + c.sl1 * z1 - c.sl2 * z2));
  k.beta2 = Complex(epsbar + c.twob, (c.qd - c.sl2 * z1 + c.sl1 * z2));
  k.gamma = Complex(c.twob, -c.slp * (z1 - z2));
  k.c1 = c.P1 * z1 - c.P2 * z2 - c.tau_l;
  k.c2 = c.P1 * z2 - c.P2 * z1 - c.tau_l;
  return k;
}

// Interference-term integrand over [-L, 0]^2 (common prefactors dropped).
Complex numerator_integrand(const RhoCoeffs& c, double z1, double z2) {
  const BarKernel k = bar_kernel(c, z1, z2);
  const Complex det = k.beta1 * k.beta2 - k.gamma * k.gamma;
  const Complex expo = (k.c1 * k.c1 * k.beta2 + k.c2 * k.c2 * k.beta1 +
                        2.0 * k.gamma * k.c1 * k.c2) /
                       (4.0 * det);
  return std::exp(-expo) / guarded_sqrt_det(det, z1, z2);
}

// Background integrand; depends only on w = z1 - z2, so the double integral
// over [-L, 0]^2 reduces exactly to Int_{-L}^{L} (L - |w|) f(w) dw.
Complex background_integrand(const RhoCoeffs& c, double w) {
  const Complex beta1(2.0 * c.eps1 + c.twob, -c.sl1 * w);
  const Complex beta2(2.0 * c.eps2 + c.twob, -c.sl2 * w);
  const Complex gamma(c.twob, -c.slp * w);
  const double c1 = c.P1 * w;
  const double c2 = -c.P2 * w;
  const Complex det = beta1 * beta2 - gamma * gamma;
  const Complex expo = (c1 * c1 * beta2 + c2 * c2 * beta1 +
                        2.0 * gamma * c1 * c2) /
                       (4.0 * det);
  return std::exp(-expo) / guarded_sqrt_det(det, 0.5 * w, -0.5 * w);
}

double background_decay(const RhoCoeffs& c, double w) {
  const Complex beta1(2.0 * c.eps1 + c.twob, -c.sl1 * w);
  const Complex beta2(2.0 * c.eps2 + c.twob, -c.sl2 * w);
  const Complex gamma(c.twob, -c.slp * w);
  const double c1 = c.P1 * w;
  const double c2 = -c.P2 * w;
  const Complex det = beta1 * beta2 - gamma * gamma;
  return ((c1 * c1 * beta2 + c2 * c2 * beta1 + 2.0 * gamma * c1 * c2) /
          (4.0 * det))
      .real();
}

// Panel breakpoints along s = z1 + z2 bracketing the numerator ridge.  The
// combination X = c1 + c2 = -(D s + 2 tau_l) controls the dominant decay
// exp(-coefX X^2) with coefX = (beta1 + beta2 + 2 gamma) / (16 det); the
// ridge sits at s0 = -2 tau_l / D.  When beta1 != beta2 the ridge center
// drifts linearly with w; the drift is bounded by evaluating it at the
// diamond extremes.
std::vector<double> numerator_panels(const RhoCoeffs& c) {
  const double L = c.L;
  const double s0 = -2.0 * c.tau_l / c.D;
  if (s0 < -2.5 * L || s0 > 0.5 * L) return {};  // ridge far outside
  const auto at = [&](double s, double w) {
    return bar_kernel(c, 0.5 * (s + w), 0.5 * (s - w));
  };
  const double sc = std::clamp(s0, -2.0 * L, 0.0);
  const BarKernel k0 = at(sc, 0.0);
  const Complex det0 = k0.beta1 * k0.beta2 - k0.gamma * k0.gamma;
  const Complex sum0 = k0.beta1 + k0.beta2 + 2.0 * k0.gamma;
  const Complex coef_x = sum0 / (16.0 * det0);
  if (!(coef_x.real() > 0.0)) return {};
  const double sigma_x = 1.0 / std::sqrt(2.0 * coef_x.real());
  double drift = 0.0;
  for (double w : {-L, -0.5 * L, 0.5 * L, L}) {
    const BarKernel k = at(sc, w);
    const Complex num = (k.beta2 - k.beta1) * (2.0 * c.Lambda * w);
    const Complex den = k.beta1 + k.beta2 + 2.0 * k.gamma;
    drift = std::max(drift, std::abs((num / den).real()));
  }
  const double half_s = (12.0 * sigma_x + 1.5 * drift) / c.D;
  if (half_s >= 0.7 * L) return {};  // broad ridge: plain rule resolves it
  return {s0 - half_s, s0 + half_s};
}

std::vector<double> background_breakpoints(const RhoCoeffs& c) {
  std::vector<double> bps = {0.0};  // kink of the (L - |w|) factor
  const double delta = c.L / 512.0;
  const double curv = background_decay(c, delta) / (delta * delta);
  if (curv > 0.0) {
    const double width = 1.0 / std::sqrt(curv);
    if (width < c.L / 6.0) {
      bps.push_back(-12.0 * width);
      bps.push_back(12.0 * width);
    }
  }
  return bps;
}

double background_value(const RhoCoeffs& c, int order,
                        const std::vector<double>& bps) {
  const Complex v = gl_sum_1d(
      [&](double w) {
        return (c.L - std::abs(w)) * background_integrand(c, w);
      },
      -c.L, c.L, order, bps);
  return v.real();
}

double numerator_value(const RhoCoeffs& c, int order,
                       const std::vector<double>& panels) {
  const Complex v = gl_sum_rotated(
      [&](double z1, double z2) { return numerator_integrand(c, z1, z2); },
      -c.L, 0.0, order, panels);
  return v.real();
}

void require_degenerate(const SetupConfig& setup) {
  detail::require(setup.centers.degenerate(),
                  "rho: the interference expressions assume degenerate "
                  "central frequencies omega_1 = omega_2");
}

SetupConfig with_l(const SetupConfig& setup, double l_mm) {
  detail::require(std::isfinite(l_mm) && l_mm >= 0.0,
                  "rho: delay-line length must be non-negative");
  SetupConfig s = setup;
  s.delay.length_l = l_mm;
  return s;
}

}  // namespace

RhoResult rho_numeric(const SetupConfig& setup_in, double l_mm,
                      const QuadratureConfig& cfg) {
  const SetupConfig setup = with_l(setup_in, l_mm);
  setup.validate();
  cfg.validate();
  require_degenerate(setup);
  detail::require(setup.filters.any_finite(),
                  "rho_numeric: requires at least one finite filter (the "
                  "kernel degenerates without filters); use rho_analytic, "
                  "rho_nofilter, or add wide finite filters");
  const RhoCoeffs c = make_rho_coeffs(setup);
  const std::vector<double> num_panels = numerator_panels(c);
  const std::vector<double> den_bps = background_breakpoints(c);

  RhoResult out;
  int order = cfg.base_order;
  double den = background_value(c, order, den_bps);
  double num = numerator_value(c, order, num_panels);
  detail::require(den > 0.0, "rho_numeric: background integral must be "
                             "positive");
  double rho_prev = num / den;
  out.rho = rho_prev;
  out.converged = false;
  for (int k = 1; k <= cfg.max_refinements; ++k) {
    order *= 2;
    den = background_value(c, order, den_bps);
    num = numerator_value(c, order, num_panels);
    const double rho_k = num / den;
    out.rho = rho_k;
    out.refinements_used = k;
    out.est_rel_error =
        std::abs(rho_k - rho_prev) / std::max(std::abs(rho_k), 0.01);
    if (out.est_rel_error <= cfg.rel_tol) {
      out.converged = true;
      break;
    }
    rho_prev = rho_k;
  }
  return out;
}

double rho_analytic(const SetupConfig& setup_in, double l_mm) {
  const SetupConfig setup = with_l(setup_in, l_mm);
  setup.validate();
  require_degenerate(setup);
  detail::require(!setup.filters.any_finite(),
                  "rho_analytic: valid only without spectral filters");
  detail::require(setup.crystal.Dp == 0.0 && setup.crystal.D1 == 0.0 &&
                      setup.crystal.D2 == 0.0 &&
                      setup.delay.d1 == setup.delay.d2,
                  "rho_analytic: valid only with zero second-order crystal "
                  "dispersion and equal delay dispersion coefficients");
  const WalkOff wo = setup.walkoff();
  const double L = setup.crystal.length_L;
  const double ai = setup.pump_in.chirp_a;
  const double tau_eff = setup.pump_in.tau_D / std::sqrt(1.0 + ai * ai);
  const double m = 0.5 * wo.D * L - std::abs(setup.dtau_l());
  if (m <= 0.0) return 0.0;
  const double x = std::sqrt(2.0) * std::abs(wo.Lambda) * m / (wo.D * tau_eff);
  if (x < 1e-3) {
    // Lambda -> 0 (or cw) limit: series of erf keeps the triangle exact.
    const double x2 = x * x;
    return 2.0 * m / (wo.D * L) * (1.0 - x2 / 3.0 + x2 * x2 / 10.0);
  }
  return std::sqrt(0.5 * kPi) * tau_eff / (std::abs(wo.Lambda) * L) *
         std::erf(x);
}

double visibility(double rho) {
  detail::require(rho >= -1e-9 && rho <= 1.0 + 1e-6,
                  "visibility: rho must lie in [0, 1]");
  const double r = std::clamp(rho, 0.0, 1.0);
  return r / (2.0 - r);
}

RhoResult rho_eval(const SetupConfig& setup, double l_mm,
                   const QuadratureConfig& cfg, RhoMethod method) {
  if (method == RhoMethod::Auto) {
    if (!setup.filters.any_finite()) {
      const bool crystal_free =
          setup.crystal.D1 == 0.0 && setup.crystal.D2 == 0.0 &&
          setup.delay.d1 == setup.delay.d2;
      if (!crystal_free)
        throw std::invalid_argument(
            "rho: no-filter configurations with signal/idler or unequal "
            "delay dispersion are unsupported; add wide finite filters");
      method = setup.crystal.Dp == 0.0 ? RhoMethod::Analytic
                                       : RhoMethod::NoFilter;
    } else {
      method = RhoMethod::Numeric;
    }
  }
  switch (method) {
    case RhoMethod::Numeric:
      return rho_numeric(setup, l_mm, cfg);
    case RhoMethod::Analytic:
      return {rho_analytic(setup, l_mm), 0.0, true, 0};
    case RhoMethod::Autocorr:
      return rho_autocorr(setup, l_mm, cfg);
    case RhoMethod::NoFilter:
      return rho_nofilter(setup, l_mm, cfg);
    default:
      throw std::invalid_argument("rho_eval: unsupported method");
  }
}

DipCurve dip_scan(const SetupConfig& setup, const Eigen::VectorXd& l_values,
                  const QuadratureConfig& cfg, RhoMethod method,
                  int threads) {
  setup.validate();
  cfg.validate();
  detail::require(l_values.size() >= 1, "dip_scan: need at least one length");
  for (Eigen::Index i = 0; i < l_values.size(); ++i) {
    detail::require(l_values[i] >= 0.0,
                    "dip_scan: delay-line lengths must be non-negative");
    if (i > 0)
      detail::require(l_values[i] > l_values[i - 1],
                      "dip_scan: lengths must be strictly increasing");
  }
  DipCurve curve;
  curve.setup = setup;
  curve.method = method;
  curve.samples.resize(static_cast<std::size_t>(l_values.size()));

  const auto job = [&](Eigen::Index i) {
    const double l = l_values[i];
    const RhoResult r = rho_eval(setup, l, cfg, method);
    DipSample& s = curve.samples[static_cast<std::size_t>(i)];
    s.l_mm = l;
    s.dtau_l = delay_to_dtau(setup.crystal, [&] {
      DelayLine d = setup.delay;
      d.length_l = l;
      return d;
    }());
    s.rho = r.rho;
    s.rn = 1.0 - r.rho;
    s.rel_err = r.est_rel_error;
    s.converged = r.converged;
  };

  const Eigen::Index n = l_values.size();
  const int nworkers = std::max(1, std::min<int>(threads, static_cast<int>(n)));
  if (nworkers == 1) {
    for (Eigen::Index i = 0; i < n; ++i) job(i);
  } else {
    std::atomic<Eigen::Index> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < nworkers; ++w)
      pool.emplace_back([&] {
        for (Eigen::Index i = next.fetch_add(1); i < n; i = next.fetch_add(1))
          job(i);
      });
    for (auto& th : pool) th.join();
  }
  for (const DipSample& s : curve.samples)
    curve.all_converged = curve.all_converged && s.converged;
  return curve;
}

double rho_overlap(const AmplitudeGrid& grid) {
  const Eigen::Index nt = grid.t_axis.size(), ntau = grid.tau_axis.size();
  detail::require(nt >= 3 && ntau >= 3, "rho_overlap: grid too small");
  const double span_t = grid.t_axis[nt - 1] - grid.t_axis[0];
  const double span_tau = grid.tau_axis[ntau - 1] - grid.tau_axis[0];
  const double dt = span_t / static_cast<double>(nt - 1);
  const double dtau = span_tau / static_cast<double>(ntau - 1);
  for (Eigen::Index i = 1; i < nt; ++i)
    detail::require(
        std::abs(grid.t_axis[i] - grid.t_axis[i - 1] - dt) <= 1e-9 * span_t,
        "rho_overlap: t axis must be uniform");
  for (Eigen::Index j = 1; j < ntau; ++j)
    detail::require(std::abs(grid.tau_axis[j] - grid.tau_axis[j - 1] - dtau) <=
                        1e-9 * span_tau,
                    "rho_overlap: tau axis must be uniform");
  for (Eigen::Index j = 0; j < ntau; ++j)
    detail::require(std::abs(grid.tau_axis[j] + grid.tau_axis[ntau - 1 - j]) <=
                        1e-9 * span_tau,
                    "rho_overlap: tau axis must be symmetric about zero");

  const double peak = grid.values.cwiseAbs().maxCoeff();
  detail::require(peak > 0.0, "rho_overlap: amplitude grid is identically 0");
  double boundary = 0.0;
  for (Eigen::Index i = 0; i < nt; ++i)
    boundary = std::max({boundary, std::abs(grid.values(i, 0)),
                         std::abs(grid.values(i, ntau - 1))});
  for (Eigen::Index j = 0; j < ntau; ++j)
    boundary = std::max({boundary, std::abs(grid.values(0, j)),
                         std::abs(grid.values(nt - 1, j))});
  detail::require(boundary <= 1e-4 * peak,
                  "rho_overlap: window truncation violation; the amplitude "
                  "does not decay below 1e-4 of its peak at the grid "
                  "boundary -- enlarge the grid window");

  double num = 0.0, den = 0.0;
  for (Eigen::Index i = 0; i < nt; ++i)
    for (Eigen::Index j = 0; j < ntau; ++j) {
      const Complex a = grid.values(i, j);
      const Complex mirrored = grid.values(i, ntau - 1 - j);
      num += (a * std::conj(mirrored)).real();
      den += std::norm(a);
    }
  detail::require(den > 0.0, "rho_overlap: zero norm");
  return num / den;
}

AmplitudeGrid overlap_grid(const SetupConfig& setup,
                           const QuadratureConfig& cfg, Eigen::Index n_t,
                           Eigen::Index n_tau, int threads) {
  setup.validate();
  detail::require(setup.filters.finite(),
                  "overlap_grid: finite filters are required so the "
                  "amplitude decays within a finite window");
  detail::require(n_t >= 16 && n_tau >= 16, "overlap_grid: grid too small");
  if (n_tau % 2 == 0) ++n_tau;  // symmetric tau axis needs an odd count

  const WalkOff wo = setup.walkoff();
  const double L = setup.crystal.length_L;
  const double l = setup.delay.length_l;
  const double tau_l = setup.tau_l();
  const double DL = wo.D * L;
  const PumpPulse out = setup.pump_out();
  const double eps = setup.filters.inv_sigma1_sq() +
                     setup.filters.inv_sigma2_sq();

  // Initial window: walk-off support mirrored in tau, plus smoothing and
  // pump-duration margins; expanded below until the boundary is quiet.
  double w_tau = std::max(std::abs(tau_l), std::abs(DL - tau_l)) +
                 12.0 * std::sqrt(2.0 * eps) + 0.1 * DL;
  const double t_mid = 0.5 * l * (setup.delay.inv_g1 + setup.delay.inv_g2) -
                       0.5 * wo.Lambda * L;
  double w_t = std::abs(wo.Lambda) * L + 5.0 * out.tau_D +
               12.0 * std::sqrt(2.0 * eps);

  const auto boundary_quiet = [&](double wt, double wtau) {
    // Probe the proposed boundary against an interior peak estimate.
    double interior = 0.0;
    for (int i = 0; i < 9; ++i)
      for (int j = 0; j < 9; ++j) {
        const double t = t_mid + wt * (i - 4) / 8.0;
        const double tau = wtau * (j - 4) / 8.0;
        interior = std::max(
            interior, std::abs(amplitude(setup, t + 0.5 * tau, t - 0.5 * tau,
                                         cfg).value));
      }
    if (interior == 0.0) return false;
    double edge = 0.0;
    for (int i = 0; i <= 16; ++i) {
      const double t = t_mid + wt * (i - 8) / 8.0;
      const double tau = wtau * (i - 8) / 8.0;
      edge = std::max({edge,
                       std::abs(amplitude(setup, t + 0.5 * wtau,
                                          t - 0.5 * wtau, cfg).value),
                       std::abs(amplitude(setup, t - 0.5 * wtau,
                                          t + 0.5 * wtau, cfg).value),
                       std::abs(amplitude(setup, t_mid + wt + 0.5 * tau,
                                          t_mid + wt - 0.5 * tau, cfg).value),
                       std::abs(amplitude(setup, t_mid - wt + 0.5 * tau,
                                          t_mid - wt - 0.5 * tau, cfg).value)});
    }
    return edge <= 2e-5 * interior;
  };

  bool ok = false;
  for (int attempt = 0; attempt < 5 && !ok; ++attempt) {
    ok = boundary_quiet(w_t, w_tau);
    if (!ok) {
      w_t *= 1.5;
      w_tau *= 1.5;
    }
  }
  detail::require(ok, "overlap_grid: could not find a window with decayed "
                      "boundaries; check the configuration");

  Eigen::VectorXd t_axis(n_t), tau_axis(n_tau);
  for (Eigen::Index i = 0; i < n_t; ++i)
    t_axis[i] = t_mid - w_t + 2.0 * w_t * static_cast<double>(i) /
                                  static_cast<double>(n_t - 1);
  for (Eigen::Index j = 0; j < n_tau; ++j)
    tau_axis[j] = -w_tau + 2.0 * w_tau * static_cast<double>(j) /
                               static_cast<double>(n_tau - 1);
  return amplitude_grid(setup, t_axis, tau_axis, cfg, threads);
}

VisibilitySample find_dip_center(const SetupConfig& setup,
                                 const QuadratureConfig& cfg,
                                 RhoMethod method) {
  setup.validate();
  const WalkOff wo = setup.walkoff();
  const double slope = setup.delay.inv_g2 - setup.delay.inv_g1;
  detail::require(slope > 0.0,
                  "find_dip_center: the delay line must retard photon 1 "
                  "relative to photon 2 (1/g2 > 1/g1) to compensate the "
                  "crystal walk-off at positive length");
  const double l_center = 0.5 * wo.D * setup.crystal.length_L / slope;
  const double half = 0.75 * wo.D * setup.crystal.length_L / slope;
  double lo = std::max(0.0, l_center - half);
  double hi = l_center + half;

  bool all_conv = true;
  const auto f = [&](double l) {
    const RhoResult r = rho_eval(setup, l, cfg, method);
    all_conv = all_conv && r.converged;
    return r.rho;
  };
  // Golden-section maximization of rho on [lo, hi].
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - gr * (hi - lo);
  double x2 = lo + gr * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 80 && (hi - lo) > 1e-7 * (1.0 + std::abs(l_center));
       ++it) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + gr * (hi - lo);
      f2 = f(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - gr * (hi - lo);
      f1 = f(x1);
    }
  }
  VisibilitySample s;
  s.tau_Di = setup.pump_in.tau_D;
  s.l_opt_mm = 0.5 * (lo + hi);
  s.rho_max = f(s.l_opt_mm);
  s.vis = visibility(s.rho_max);
  s.converged = all_conv;
  return s;
}

std::vector<VisibilitySample> visibility_vs_duration(
    const SetupConfig& setup, const std::vector<double>& durations,
    const QuadratureConfig& cfg, RhoMethod method, int threads) {
  detail::require(!durations.empty(),
                  "visibility_vs_duration: no durations given");
  std::vector<VisibilitySample> out(durations.size());
  const auto job = [&](std::size_t i) {
    SetupConfig s = setup;
    s.pump_in.tau_D = durations[i];
    out[i] = find_dip_center(s, cfg, method);
  };
  const std::size_t n = durations.size();
  const int nworkers =
      std::max(1, std::min<int>(threads, static_cast<int>(n)));
  if (nworkers == 1) {
    for (std::size_t i = 0; i < n; ++i) job(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < nworkers; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1))
          job(i);
      });
    for (auto& th : pool) th.join();
  }
  return out;
}

}  // namespace spdc
