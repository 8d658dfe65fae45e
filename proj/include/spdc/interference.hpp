#pragma once

// Normalized coincidence rate Rn(l) = 1 - rho(l) of the polarization
// interferometer, where rho is the ratio of the interference term to the
// constant background.  Several evaluation routes are provided: direct
// quadrature of the closed-frequency-form double integrals, the
// erf-shaped analytic limit, the pump-autocorrelation representation, and
// a discrete overlap of tabulated two-photon amplitudes.  All constant
// prefactors cancel inside rho.

#include <vector>

#include <Eigen/Dense>

#include "spdc/amplitude.hpp"
#include "spdc/quadrature.hpp"
#include "spdc/types.hpp"

namespace spdc {

enum class RhoMethod { Auto, Numeric, Analytic, Autocorr, NoFilter };

struct RhoResult {
  double rho = 0.0;
  double est_rel_error = 0.0;
  bool converged = true;
  int refinements_used = 0;
};

// rho via the z1/z2 double integrals (finite filters required).  The
// numerator integrand is a Gaussian ridge along z1 + z2 of width set by the
// filter bandwidths; it is integrated in rotated coordinates with panels
// placed analytically around the ridge.  The denominator reduces exactly to
// a one-dimensional integral over w = z1 - z2.
RhoResult rho_numeric(const SetupConfig& setup, double l_mm,
                      const QuadratureConfig& cfg);

// Closed form for a Gaussian pump, no filters and no second-order
// dispersion:
//   rho = sqrt(pi/2) (tau'/( |Lambda| L)) erf( sqrt2 |Lambda| (DL/2 -
//         |dtau_l|) / (D tau') ),  tau' = tau_Di / sqrt(1 + a_i^2),
// clamped to 0 for |dtau_l| > DL/2 and continued by its Lambda -> 0 limit
// 1 - 2|dtau_l|/(DL) (triangular dip).
double rho_analytic(const SetupConfig& setup, double l_mm);

// V = rho / (2 - rho) for rho in [0, 1].
double visibility(double rho);

// Validity-based dispatcher: Analytic when no filters and no second-order
// terms; the no-filter autocorrelation route when no filters and pump-only
// dispersion; Numeric otherwise (finite filters required).
RhoResult rho_eval(const SetupConfig& setup, double l_mm,
                   const QuadratureConfig& cfg,
                   RhoMethod method = RhoMethod::Auto);

struct DipSample {
  double l_mm = 0.0;
  double dtau_l = 0.0;  // s
  double rho = 0.0;
  double rn = 0.0;      // 1 - rho
  double rel_err = 0.0;
  bool converged = true;
};

struct DipCurve {
  std::vector<DipSample> samples;
  SetupConfig setup;
  RhoMethod method = RhoMethod::Auto;
  bool all_converged = true;
};

// Evaluates rho at each delay-line length (mm, non-negative, strictly
// increasing); samples are distributed across `threads` workers with
// deterministic placement.
DipCurve dip_scan(const SetupConfig& setup, const Eigen::VectorXd& l_values,
                  const QuadratureConfig& cfg,
                  RhoMethod method = RhoMethod::Auto, int threads = 1);

// Discrete overlap rho from a tabulated amplitude grid:
//   rho = sum Re[A(t, tau) conj(A(t, -tau))] / sum |A(t, tau)|^2.
// Requires uniform axes, a tau axis symmetric about 0, and boundary decay
// below 1e-4 of the grid peak (window truncation check).
double rho_overlap(const AmplitudeGrid& grid);

// Builds an amplitude grid sized for rho_overlap: windows start from the
// walk-off support plus filter/dispersion margins and expand until the
// boundary amplitude is negligible.
AmplitudeGrid overlap_grid(const SetupConfig& setup,
                           const QuadratureConfig& cfg, Eigen::Index n_t,
                           Eigen::Index n_tau, int threads = 1);

struct VisibilitySample {
  double tau_Di = 0.0;   // s
  double l_opt_mm = 0.0; // delay-line length maximizing rho
  double rho_max = 0.0;
  double vis = 0.0;
  bool converged = true;
};

// Golden-section search for the delay-line length maximizing rho (the dip
// minimum of Rn), bracketed around the walk-off compensation point.
VisibilitySample find_dip_center(const SetupConfig& setup,
                                 const QuadratureConfig& cfg,
                                 RhoMethod method = RhoMethod::Auto);

// Visibility at the dip center for each pump duration (input-plane tau_Di).
std::vector<VisibilitySample> visibility_vs_duration(
    const SetupConfig& setup, const std::vector<double>& durations,
    const QuadratureConfig& cfg, RhoMethod method = RhoMethod::Auto,
    int threads = 1);

}  // namespace spdc
