#pragma once

// Two-photon amplitude of the collinear type-II source: the z-integral of
// the Gaussian kernel obtained by carrying out the frequency integrals in
// closed form, its wide-filter/zero-dispersion analytic limit, and sampled
// amplitude maps A(t, tau) in the mean/relative detection-time coordinates
//   t = (tau_1 + tau_2)/2,   tau = tau_1 - tau_2.
// Carrier phases e^{-i omega0 tau_j} are dropped throughout; they cancel in
// every overlap and rate ratio computed from these amplitudes.

#include <vector>

#include <Eigen/Dense>

#include "spdc/quadrature.hpp"
#include "spdc/types.hpp"

namespace spdc {

// Full description of one interference setup.  The pump is specified at the
// crystal *input* plane; the kernel coefficients use the output-plane
// duration/chirp obtained from propagate_through_crystal (b is shared by
// both planes).
struct SetupConfig {
  CrystalParams crystal;
  PumpPulse pump_in;
  DelayLine delay;
  FilterPair filters;
  CentralFrequencies centers =
      CentralFrequencies::from_wavelengths_nm(397.5, 795.0, 795.0);

  void validate() const;

  WalkOff walkoff() const { return derived_D_Lambda(crystal); }
  double b() const { return pump_in.b(); }
  double tau_l() const { return delay.tau_l(); }
  double dtau_l() const { return delay_to_dtau(crystal, delay); }
  PumpPulse pump_out() const;
};

// Kernel coefficients at crystal coordinate z in [-L, 0] for detection-time
// arguments folded in through c1/c2:
//   beta_j(z) = 1/sigma_j^2 + b (1 - i a) - i d_j l / 4 pi
//               - i (Dp - D_j) z / 4 pi
//   gamma(z)  = b (1 - i a) - i Dp z / 4 pi
//   c_j(z)    = (-1)^{j-1} [ (1/vp - 1/v_j) z + l/g_j - tau_j ]
// with a the output-plane chirp.
struct BetaCGamma {
  Complex beta1;
  Complex beta2;
  Complex gamma;
  double c1 = 0.0;
  double c2 = 0.0;
};

BetaCGamma beta_c_gamma(const SetupConfig& setup, double z, double tau1,
                        double tau2);

struct AmplitudeResult {
  Complex value{0.0, 0.0};
  double est_rel_error = 0.0;  // relative to the kernel peak scale
  bool converged = false;
  int refinements_used = 0;
};

// A(tau_1, tau_2) = Int_{-L}^{0} dz pi / sqrt(beta1 beta2 - gamma^2)
//                   * exp(-(c1^2 beta2 + c2^2 beta1 + 2 gamma c1 c2)
//                         / (4 (beta1 beta2 - gamma^2))).
// Overall constant prefactors are omitted; they cancel in all ratios.
// Requires at least one finite filter (otherwise the kernel is degenerate
// when all second-order terms vanish; use amplitude_analytic there).
AmplitudeResult amplitude(const SetupConfig& setup, double tau1, double tau2,
                          const QuadratureConfig& cfg);

// Wide-filter, zero-dispersion limit (no filters, Dp = D1 = D2 = d1 = d2 = 0):
//   A(t, tau) = 4 pi sqrt(pi) (1+a_i^2)^{1/4} / (tau_Di |D|)
//               * rect((tau + tau_l) / (D L))
//               * exp(-(1 + i a_i) (t - t_c + (Lambda/D)(tau + tau_l))^2
//                     / tau_Di^2)
// with rect(x) = 1 for 0 < x < 1 and t_c = l (1/g1 + 1/g2)/2; equals the
// sigma -> infinity limit of amplitude() up to the constant phase
// e^{i atan(a_i)/2}.
Complex amplitude_analytic(const SetupConfig& setup, double tau1, double tau2);

struct AmplitudeGrid {
  Eigen::VectorXd t_axis;    // mean detection times (s), strictly increasing
  Eigen::VectorXd tau_axis;  // relative detection times (s), strictly increasing
  Eigen::MatrixXcd values;   // values(i, j) = A(t_axis[i], tau_axis[j])
  SetupConfig setup;
  bool all_converged = true;
  double max_est_rel_error = 0.0;
};

// Samples amplitude() (or amplitude_analytic when analytic=true) on the
// tensor grid; rows are computed in parallel across `threads` workers with
// deterministic placement.  Points whose modulus is below 1e-10 of the grid
// maximum are exempt from the convergence flag (their relative error is
// irrelevant next to the peak).
AmplitudeGrid amplitude_grid(const SetupConfig& setup,
                             const Eigen::VectorXd& t_axis,
                             const Eigen::VectorXd& tau_axis,
                             const QuadratureConfig& cfg, int threads = 1,
                             bool analytic = false);

}  // namespace spdc
