#pragma once

// Gauss-Legendre quadrature with panel subdivision and order-doubling
// refinement.  The integrands in this library are complex Gaussian kernels
// that can develop very narrow ridges ("needles") whose width is set by the
// filter bandwidths; callers pass breakpoints that bracket those ridges so
// a fixed-order rule resolves them.

#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "spdc/types.hpp"

namespace spdc {

struct QuadratureConfig {
  int base_order = 32;       // Gauss-Legendre nodes per panel and axis, >= 8
  int max_refinements = 4;   // order doublings allowed beyond the base
  double rel_tol = 1e-8;     // refinement stops when successive estimates agree

  void validate() const {
    detail::require(base_order >= 8, "QuadratureConfig: base_order must be >= 8");
    detail::require(max_refinements >= 0 && max_refinements <= 12,
                    "QuadratureConfig: max_refinements must be in [0, 12]");
    detail::require(rel_tol > 0.0 && rel_tol < 1.0,
                    "QuadratureConfig: rel_tol must be in (0, 1)");
  }
};

struct QuadratureResult {
  Complex value{0.0, 0.0};
  double est_rel_error = 0.0;  // |I_k - I_{k-1}| / max(|I_k|, abs_scale)
  bool converged = false;
  int refinements_used = 0;
};

// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
// Computed by Newton iteration on the Legendre recurrence and cached.
struct GaussLegendreRule {
  Eigen::ArrayXd nodes;
  Eigen::ArrayXd weights;
};

const GaussLegendreRule& gauss_legendre(int order);

// Principal branch square root (non-negative real part).  w must be nonzero.
Complex principal_sqrt(Complex w);

// Principal sqrt of a Gaussian-kernel determinant beta1*beta2 - gamma^2.
// For every finite-filter configuration handled here the coefficient matrix
// has a positive-definite real part, so the determinant stays off the branch
// cut (-inf, 0] and the principal branch is the analytically correct one.
// A determinant on (or within floating tolerance of) the cut means the
// kernel is degenerate or outside the supported regime: fail loudly, naming
// the sample point.
Complex guarded_sqrt_det(Complex det, double z1, double z2);

using Integrand1D = std::function<Complex(double)>;
using Integrand2D = std::function<Complex(double, double)>;

// Fixed-order panel sums (no refinement).  breakpoints are clipped to (a, b)
// and sorted; they split the interval into panels integrated independently.
Complex gl_sum_1d(const Integrand1D& f, double a, double b, int order,
                  const std::vector<double>& breakpoints = {});

// Fixed-order sum of \int\int_{[z_lo, z_hi]^2} f(z1, z2) dz1 dz2 evaluated in
// rotated coordinates s = z1 + z2 (outer, panelled via s_breakpoints) and
// w = z1 - z2 (inner, Gauss-Legendre across the diamond width at each s).
Complex gl_sum_rotated(const Integrand2D& f, double z_lo, double z_hi,
                       int order, const std::vector<double>& s_breakpoints = {});

// Refining integrators built on the fixed-order sums.  abs_scale (default 0)
// enters the convergence test |I_k - I_{k-1}| <= rel_tol * max(|I_k|,
// abs_scale), so integrals that are legitimately ~0 against a known external
// scale can still converge.
QuadratureResult integrate_1d(const Integrand1D& f, double a, double b,
                              const QuadratureConfig& cfg,
                              const std::vector<double>& breakpoints = {},
                              double abs_scale = 0.0);

// Tensor-product rule on [ax, bx] x [ay, by] (both axes refined together).
QuadratureResult integrate_2d(const Integrand2D& f, double ax, double bx,
                              double ay, double by,
                              const QuadratureConfig& cfg);

QuadratureResult integrate_square_rotated(
    const Integrand2D& f, double z_lo, double z_hi,
    const QuadratureConfig& cfg,
    const std::vector<double>& s_breakpoints = {}, double abs_scale = 0.0);

}  // namespace spdc
