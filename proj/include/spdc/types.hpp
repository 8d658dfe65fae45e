#pragma once

// Basic parameter types for the collinear type-II downconversion setup:
// crystal, pump pulse, birefringent delay line, spectral filters, carrier
// frequencies.  Units follow one convention throughout the library:
// times in seconds, lengths in millimetres, inverse group velocities in
// s/mm, second-order dispersion coefficients in s^2/mm, angular
// frequencies in rad/s.

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>

namespace spdc {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

// Speed of light in nm/s; wavelengths are specified in nm.
inline constexpr double kSpeedOfLightNmS = 2.99792458e17;

// Sentinel for an absent spectral filter (sigma -> infinity).
inline constexpr double kNoFilter = std::numeric_limits<double>::infinity();

namespace detail {
inline void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}
}  // namespace detail

// Nonlinear crystal of length L: inverse group velocities of the pump and
// the two down-converted (ordinary/extraordinary) photons plus the
// second-order dispersion coefficients of all three waves.
struct CrystalParams {
  double length_L = 0.0;   // mm
  double inv_vp = 0.0;     // s/mm, pump
  double inv_v1 = 0.0;     // s/mm, photon 1
  double inv_v2 = 0.0;     // s/mm, photon 2
  double Dp = 0.0;         // s^2/mm
  double D1 = 0.0;         // s^2/mm
  double D2 = 0.0;         // s^2/mm

  void validate() const {
    detail::require(std::isfinite(length_L) && length_L > 0.0,
                    "CrystalParams: crystal length L must be positive");
    detail::require(std::isfinite(inv_vp) && std::isfinite(inv_v1) &&
                        std::isfinite(inv_v2),
                    "CrystalParams: inverse group velocities must be finite");
    detail::require(std::isfinite(Dp) && std::isfinite(D1) && std::isfinite(D2),
                    "CrystalParams: dispersion coefficients must be finite");
  }
};

// Group-velocity mismatch parameters of the crystal:
//   D      = 1/v1 - 1/v2        (inter-photon walk-off per unit length)
//   Lambda = 1/vp - (1/v1 + 1/v2)/2   (pump vs. photon-pair walk-off)
struct WalkOff {
  double D = 0.0;       // s/mm
  double Lambda = 0.0;  // s/mm
};

inline WalkOff derived_D_Lambda(const CrystalParams& c) {
  return {c.inv_v1 - c.inv_v2, c.inv_vp - 0.5 * (c.inv_v1 + c.inv_v2)};
}

// Gaussian pump pulse exp(-(1 + i a) t^2 / tau_D^2); tau_D is the duration
// parameter and a the linear chirp.  Which plane (crystal input or output)
// the pair refers to is a matter of bookkeeping at the call site.
struct PumpPulse {
  double tau_D = 0.0;  // s
  double chirp_a = 0.0;

  void validate() const {
    detail::require(std::isfinite(tau_D) && tau_D > 0.0,
                    "PumpPulse: duration tau_D must be positive");
    detail::require(std::isfinite(chirp_a), "PumpPulse: chirp must be finite");
  }

  // Squared inverse spectral width b = tau_D^2 / (4 (1 + a^2)); the only
  // combination of (tau_D, a) the coincidence rate depends on.
  double b() const { return tau_D * tau_D / (4.0 * (1.0 + chirp_a * chirp_a)); }
};

// Birefringent delay line of length l: inverse group velocities of the two
// polarization modes and their second-order dispersion coefficients.
struct DelayLine {
  double inv_g1 = 0.0;   // s/mm
  double inv_g2 = 0.0;   // s/mm
  double d1 = 0.0;       // s^2/mm
  double d2 = 0.0;       // s^2/mm
  double length_l = 0.0; // mm, >= 0

  void validate() const {
    detail::require(std::isfinite(inv_g1) && std::isfinite(inv_g2),
                    "DelayLine: inverse group velocities must be finite");
    detail::require(std::isfinite(d1) && std::isfinite(d2),
                    "DelayLine: dispersion coefficients must be finite");
    detail::require(std::isfinite(length_l) && length_l >= 0.0,
                    "DelayLine: length l must be non-negative");
  }

  // Relative delay accumulated between the two photons over length l.
  double tau_l() const { return (inv_g2 - inv_g1) * length_l; }
};

// Gaussian spectral filters in front of the detectors, amplitude profile
// exp(-Omega^2 / sigma^2); sigma = kNoFilter means no filter.
struct FilterPair {
  double sigma1 = kNoFilter;  // rad/s
  double sigma2 = kNoFilter;  // rad/s

  static FilterPair none() { return {kNoFilter, kNoFilter}; }

  void validate() const {
    detail::require(sigma1 > 0.0 && sigma2 > 0.0 && !std::isnan(sigma1) &&
                        !std::isnan(sigma2),
                    "FilterPair: filter widths must be positive (or infinite "
                    "for no filter)");
  }

  bool finite() const {
    return std::isfinite(sigma1) && std::isfinite(sigma2);
  }
  bool any_finite() const {
    return std::isfinite(sigma1) || std::isfinite(sigma2);
  }
  double inv_sigma1_sq() const {
    return std::isfinite(sigma1) ? 1.0 / (sigma1 * sigma1) : 0.0;
  }
  double inv_sigma2_sq() const {
    return std::isfinite(sigma2) ? 1.0 / (sigma2 * sigma2) : 0.0;
  }
};

// Central (carrier) angular frequencies; energy conservation requires
// omega_p = omega_1 + omega_2.
struct CentralFrequencies {
  double omega_p = 0.0;  // rad/s
  double omega_1 = 0.0;  // rad/s
  double omega_2 = 0.0;  // rad/s

  static CentralFrequencies from_wavelengths_nm(double lambda_p,
                                                double lambda_1,
                                                double lambda_2) {
    detail::require(lambda_p > 0.0 && lambda_1 > 0.0 && lambda_2 > 0.0,
                    "CentralFrequencies: wavelengths must be positive");
    const double twopic = 2.0 * kPi * kSpeedOfLightNmS;
    return {twopic / lambda_p, twopic / lambda_1, twopic / lambda_2};
  }

  void validate() const {
    detail::require(omega_p > 0.0 && omega_1 > 0.0 && omega_2 > 0.0,
                    "CentralFrequencies: frequencies must be positive");
    detail::require(
        std::abs(omega_p - omega_1 - omega_2) <= 1e-9 * omega_p,
        "CentralFrequencies: energy conservation omega_p = omega_1 + omega_2 "
        "violated");
  }

  bool degenerate() const {
    return std::abs(omega_1 - omega_2) <= 1e-9 * omega_1;
  }
};

// rms width (rad/s) of a Gaussian spectral filter specified as a wavelength
// FW delta_lambda around lambda0 (both nm): sigma = 2 pi c dlambda / lambda0^2.
// delta_lambda = infinity maps to the no-filter sentinel.
inline double filter_width_from_wavelength(double delta_lambda_nm,
                                           double lambda0_nm) {
  detail::require(lambda0_nm > 0.0,
                  "filter_width_from_wavelength: lambda0 must be positive");
  if (std::isinf(delta_lambda_nm)) return kNoFilter;
  detail::require(delta_lambda_nm > 0.0,
                  "filter_width_from_wavelength: delta_lambda must be positive");
  return 2.0 * kPi * kSpeedOfLightNmS * delta_lambda_nm /
         (lambda0_nm * lambda0_nm);
}

// Offset of the inter-photon delay from the dip center: dtau_l = tau_l - DL/2.
inline double delay_to_dtau(const CrystalParams& c, const DelayLine& dl) {
  const WalkOff wo = derived_D_Lambda(c);
  return dl.tau_l() - 0.5 * wo.D * c.length_L;
}

}  // namespace spdc
