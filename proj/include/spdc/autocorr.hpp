#pragma once

// Pump-autocorrelation representation of the coincidence rate: for equal
// filters and dispersion-free signal/idler propagation, rho reduces to
// ratios of integrals over the field autocorrelation
//   gamma(z1, z2, x) = Int dt E(zeta1, t) conj(E(zeta2, t + x)),
// where E is the dispersed, spectrally filtered pump field (filter width
// sigma = sqrt(2) sigma_1) and zeta_j are propagation distances inside the
// crystal.  gamma depends only on w = z1 - z2 and x for any pump spectrum,
// which reduces both rate integrals to one dimension.  This route also
// accepts arbitrary tabulated pump spectra.

#include <istream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spdc/amplitude.hpp"
#include "spdc/interference.hpp"
#include "spdc/quadrature.hpp"
#include "spdc/types.hpp"

namespace spdc {

// Tabulated pump spectrum: rows "Omega_rad_s re im" (whitespace separated,
// '#' comments), strictly increasing Omega.  The modulus must decay below
// 1e-6 of its peak at both edges so truncating the frequency integrals to
// the tabulated range is harmless.  Values are interpolated linearly; only
// |E(Omega)|^2 enters the autocorrelation.
struct PumpSpectrumTable {
  Eigen::ArrayXd omega;   // rad/s
  Eigen::ArrayXcd value;  // spectral amplitude (arbitrary units)

  static PumpSpectrumTable load(const std::string& path);
  static PumpSpectrumTable parse(std::istream& in, const std::string& name);
  void validate() const;
  double abs2(double w) const;  // |E(Omega)|^2, 0 outside the table
};

// Closed-form autocorrelation for the Gaussian pump:
//   gamma(z1, z2, x) = (tau_Di^2 / (2 sqrt(1 + a_i^2))) sqrt(pi / psi)
//                      exp(-x^2 / (4 psi)),
//   psi = 2 b_i + 2/sigma^2 - i Dp (z1 - z2) / (4 pi).
Complex gamma_gaussian(const PumpPulse& pump_in, double Dp, double sigma,
                       double z1, double z2, double x);

// Time-domain evaluation of the same object from the propagated, filtered
// pump field (validation path; crystal input face at -L/2).
Complex gamma_numeric(const PumpPulse& pump_in, double Dp, double L,
                      double sigma, double z1, double z2, double x,
                      const QuadratureConfig& cfg);

// Frequency-domain autocorrelation for a tabulated spectrum:
//   gamma = 2 pi Int dOmega |E(Omega)|^2 e^{-2 Omega^2 / sigma^2}
//           e^{i Dp Omega^2 (z1 - z2) / 4 pi} e^{i Omega x}.
Complex gamma_table(const PumpSpectrumTable& table, double Dp, double sigma,
                    double z1, double z2, double x);

// rho from the autocorrelation representation.  Requires equal finite
// filters, D1 = D2 = 0 and d1 = d2 (the regime in which the representation
// is exact).  The tabulated-spectrum overload replaces the Gaussian pump of
// the setup by the table.
RhoResult rho_autocorr(const SetupConfig& setup, double l_mm,
                       const QuadratureConfig& cfg);
RhoResult rho_autocorr(const PumpSpectrumTable& table,
                       const SetupConfig& setup, double l_mm,
                       const QuadratureConfig& cfg);

// sigma -> infinity limit of the autocorrelation representation:
//   rho(dtau_l) = Re Int_{-W}^{W} gamma(w, Lambda w) dw / (2 gamma(0,0) L),
//   W = L - 2 |dtau_l| / D   (0 outside the walk-off window).
// Valid without filters for pump-only dispersion; reproduces the erf closed
// form for a Gaussian dispersion-free pump.
RhoResult rho_nofilter(const SetupConfig& setup, double l_mm,
                       const QuadratureConfig& cfg);
RhoResult rho_nofilter(const PumpSpectrumTable& table,
                       const SetupConfig& setup, double l_mm,
                       const QuadratureConfig& cfg);

}  // namespace spdc
