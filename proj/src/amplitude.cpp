#include "spdc/amplitude.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "spdc/pump.hpp"

namespace spdc {

void SetupConfig::validate() const {
  crystal.validate();
  pump_in.validate();
  delay.validate();
  filters.validate();
  centers.validate();
  const WalkOff wo = walkoff();
  detail::require(wo.D > 0.0,
                  "SetupConfig: group-velocity mismatch D = 1/v1 - 1/v2 must "
                  "be positive; swap the beam labels 1 <-> 2");
}

PumpPulse SetupConfig::pump_out() const {
  return propagate_through_crystal(pump_in, crystal.Dp, crystal.length_L);
}

namespace {

// z-independent pieces of the amplitude kernel coefficients, built once per
// amplitude evaluation grid.
struct AmpCoeffs {
  Complex base1, base2, baseg;   // beta_j(0), gamma(0)
  double slope1, slope2, slopeg; // beta_j(z) = base_j - i slope_j z, etc.
  double P1, P2;                 // 1/vp - 1/v_j
  double off1, off2;             // l/g_j
  double L = 0.0;
  double D = 0.0;
  double tau_l = 0.0;
};

AmpCoeffs make_amp_coeffs(const SetupConfig& setup) {
  const PumpPulse out = setup.pump_out();
  const double b = setup.b();
  const Complex b1ia = b * Complex(1.0, -out.chirp_a);
  const double l = setup.delay.length_l;
  const double inv4pi = 1.0 / (4.0 * kPi);
  AmpCoeffs c;
  c.base1 = setup.filters.inv_sigma1_sq() + b1ia +
            Complex(0.0, -setup.delay.d1 * l * inv4pi);
  c.base2 = setup.filters.inv_sigma2_sq() + b1ia +
            Complex(0.0, -setup.delay.d2 * l * inv4pi);
  c.baseg = b1ia;
  c.slope1 = (setup.crystal.Dp - setup.crystal.D1) * inv4pi;
  c.slope2 = (setup.crystal.Dp - setup.crystal.D2) * inv4pi;
  c.slopeg = setup.crystal.Dp * inv4pi;
  c.P1 = setup.crystal.inv_vp - setup.crystal.inv_v1;
  c.P2 = setup.crystal.inv_vp - setup.crystal.inv_v2;
  c.off1 = l * setup.delay.inv_g1;
  c.off2 = l * setup.delay.inv_g2;
  c.L = setup.crystal.length_L;
  const WalkOff wo = setup.walkoff();
  c.D = wo.D;
  c.tau_l = setup.tau_l();
  return c;
}

BetaCGamma eval_coeffs(const AmpCoeffs& c, double z, double tau1,
                       double tau2) {
  BetaCGamma k;
  k.beta1 = c.base1 + Complex(0.0, -c.slope1 * z);
  k.beta2 = c.base2 + Complex(0.0, -c.slope2 * z);
  k.gamma = c.baseg + Complex(0.0, -c.slopeg * z);
  k.c1 = c.P1 * z + c.off1 - tau1;
  k.c2 = -(c.P2 * z + c.off2 - tau2);
  return k;
}

// Exponent (positive decay) and determinant of the kernel at z.
struct KernelParts {
  Complex det;
  Complex expo;
};

KernelParts kernel_parts(const AmpCoeffs& c, double z, double tau1,
                         double tau2) {
  const BetaCGamma k = eval_coeffs(c, z, tau1, tau2);
  KernelParts p;
  p.det = k.beta1 * k.beta2 - k.gamma * k.gamma;
  p.expo = (k.c1 * k.c1 * k.beta2 + k.c2 * k.c2 * k.beta1 +
            2.0 * k.gamma * k.c1 * k.c2) /
           (4.0 * p.det);
  return p;
}

Complex kernel_value(const AmpCoeffs& c, double z, double tau1, double tau2) {
  const KernelParts p = kernel_parts(c, z, tau1, tau2);
  return kPi / guarded_sqrt_det(p.det, z, z) * std::exp(-p.expo);
}

struct NeedlePanels {
  std::vector<double> breakpoints;
  double peak_scale = 0.0;  // rough magnitude scale of the integral
};

// The decay exponent along z is nearly quadratic around the zero of the
// group-delay argument c1 + c2 = -(D z + tau + tau_l).  Probe its curvature
// there; when the resulting Gaussian is much narrower than the crystal,
// bracket it with panels so the fixed-order rule resolves it.
NeedlePanels needle_panels(const AmpCoeffs& c, double tau1, double tau2) {
  NeedlePanels out;
  const double L = c.L;
  const double tau = tau1 - tau2;
  double zc = std::clamp(-(tau + c.tau_l) / c.D, -L, 0.0);
  const double delta = L / 512.0;
  const auto E = [&](double z) {
    return kernel_parts(c, z, tau1, tau2).expo.real();
  };
  const double zp = std::min(zc + delta, 0.0), zm = std::max(zc - delta, -L);
  const double e0 = E(zc), ep = E(zp), em = E(zm);
  const double d1 = (ep - em) / (zp - zm);
  const double d2 = 4.0 * (ep - 2.0 * e0 + em) / ((zp - zm) * (zp - zm));
  if (d2 > 0.0 && std::isfinite(d2)) {
    const double shift = d1 / d2;
    if (std::abs(shift) < L) zc = std::clamp(zc - shift, -L, 0.0);
  }
  const double width = d2 > 0.0 ? 1.0 / std::sqrt(d2) : L;
  if (width < L / 6.0) {
    const double half = 12.0 * width;
    out.breakpoints = {zc - half, zc + half};
  }
  const Complex det = kernel_parts(c, zc, tau1, tau2).det;
  out.peak_scale =
      kPi / std::sqrt(std::abs(det)) * std::min(L, 2.0 * width);
  return out;
}

}  // namespace

BetaCGamma beta_c_gamma(const SetupConfig& setup, double z, double tau1,
                        double tau2) {
  setup.validate();
  detail::require(z >= -setup.crystal.length_L && z <= 0.0,
                  "beta_c_gamma: z must lie in [-L, 0]");
  return eval_coeffs(make_amp_coeffs(setup), z, tau1, tau2);
}

AmplitudeResult amplitude(const SetupConfig& setup, double tau1, double tau2,
                          const QuadratureConfig& cfg) {
  setup.validate();
  const bool second_order_free =
      setup.crystal.Dp == 0.0 && setup.crystal.D1 == 0.0 &&
      setup.crystal.D2 == 0.0 && setup.delay.d1 == 0.0 && setup.delay.d2 == 0.0;
  if (!setup.filters.any_finite() && second_order_free)
    throw std::invalid_argument(
        "amplitude: degenerate kernel (no filters and no second-order "
        "dispersion); use amplitude_analytic");
  const AmpCoeffs coeffs = make_amp_coeffs(setup);
  const NeedlePanels panels = needle_panels(coeffs, tau1, tau2);
  const QuadratureResult q = integrate_1d(
      [&](double z) { return kernel_value(coeffs, z, tau1, tau2); },
      -setup.crystal.length_L, 0.0, cfg, panels.breakpoints,
      panels.peak_scale);
  return {q.value, q.est_rel_error, q.converged, q.refinements_used};
}

Complex amplitude_analytic(const SetupConfig& setup, double tau1,
                           double tau2) {
  setup.validate();
  detail::require(!setup.filters.any_finite(),
                  "amplitude_analytic: valid only without spectral filters");
  detail::require(setup.crystal.Dp == 0.0 && setup.crystal.D1 == 0.0 &&
                      setup.crystal.D2 == 0.0 && setup.delay.d1 == 0.0 &&
                      setup.delay.d2 == 0.0,
                  "amplitude_analytic: valid only with all second-order "
                  "dispersion coefficients zero");
  const WalkOff wo = setup.walkoff();
  const double L = setup.crystal.length_L;
  const double l = setup.delay.length_l;
  const double t = 0.5 * (tau1 + tau2) -
                   0.5 * l * (setup.delay.inv_g1 + setup.delay.inv_g2);
  const double tau_shift = (tau1 - tau2) + setup.tau_l();
  const double x = tau_shift / (wo.D * L);
  if (!(x > 0.0 && x < 1.0)) return {0.0, 0.0};
  const PumpPulse& p = setup.pump_in;
  const double pref = 4.0 * kPi * std::sqrt(kPi) *
                      std::pow(1.0 + p.chirp_a * p.chirp_a, 0.25) /
                      (p.tau_D * wo.D);
  const double arg = (t + (wo.Lambda / wo.D) * tau_shift) / p.tau_D;
  return pref * std::exp(Complex(1.0, p.chirp_a) * (-arg * arg));
}

AmplitudeGrid amplitude_grid(const SetupConfig& setup,
                             const Eigen::VectorXd& t_axis,
                             const Eigen::VectorXd& tau_axis,
                             const QuadratureConfig& cfg, int threads,
                             bool analytic) {
  setup.validate();
  cfg.validate();
  detail::require(t_axis.size() >= 2 && tau_axis.size() >= 2,
                  "amplitude_grid: axes need at least two points");
  for (Eigen::Index i = 1; i < t_axis.size(); ++i)
    detail::require(t_axis[i] > t_axis[i - 1],
                    "amplitude_grid: t axis must be strictly increasing");
  for (Eigen::Index j = 1; j < tau_axis.size(); ++j)
    detail::require(tau_axis[j] > tau_axis[j - 1],
                    "amplitude_grid: tau axis must be strictly increasing");

  AmplitudeGrid grid;
  grid.t_axis = t_axis;
  grid.tau_axis = tau_axis;
  grid.setup = setup;
  grid.values.resize(t_axis.size(), tau_axis.size());
  const Eigen::Index nt = t_axis.size(), ntau = tau_axis.size();
  std::vector<double> errs(static_cast<std::size_t>(nt), 0.0);
  std::vector<unsigned char> conv(static_cast<std::size_t>(nt * ntau), 1);

  const auto row_job = [&](Eigen::Index i) {
    double row_err = 0.0;
    for (Eigen::Index j = 0; j < ntau; ++j) {
      const double tau1 = t_axis[i] + 0.5 * tau_axis[j];
      const double tau2 = t_axis[i] - 0.5 * tau_axis[j];
      if (analytic) {
        grid.values(i, j) = amplitude_analytic(setup, tau1, tau2);
      } else {
        const AmplitudeResult r = amplitude(setup, tau1, tau2, cfg);
        grid.values(i, j) = r.value;
        row_err = std::max(row_err, r.est_rel_error);
        conv[static_cast<std::size_t>(i * ntau + j)] = r.converged ? 1 : 0;
      }
    }
    errs[static_cast<std::size_t>(i)] = row_err;
  };

  const int nworkers = std::max(1, std::min<int>(threads, static_cast<int>(nt)));
  if (nworkers == 1) {
    for (Eigen::Index i = 0; i < nt; ++i) row_job(i);
  } else {
    std::atomic<Eigen::Index> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(nworkers));
    for (int w = 0; w < nworkers; ++w)
      pool.emplace_back([&] {
        for (Eigen::Index i = next.fetch_add(1); i < nt;
             i = next.fetch_add(1))
          row_job(i);
      });
    for (auto& th : pool) th.join();
  }

  const double peak = grid.values.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < nt; ++i) {
    grid.max_est_rel_error = std::max(grid.max_est_rel_error,
                                      errs[static_cast<std::size_t>(i)]);
    for (Eigen::Index j = 0; j < ntau; ++j)
      if (!conv[static_cast<std::size_t>(i * ntau + j)] &&
          std::abs(grid.values(i, j)) > 1e-10 * peak)
        grid.all_converged = false;
  }
  detail::require(grid.values.allFinite(),
                  "amplitude_grid: non-finite amplitude encountered");
  return grid;
}

}  // namespace spdc
