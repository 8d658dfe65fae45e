#include "spdc/pump.hpp"

#include <cmath>

#include "spdc/quadrature.hpp"

namespace spdc {

Complex pump_envelope(const PumpPulse& pump, double t) {
  pump.validate();
  const double u = t / pump.tau_D;
  return std::exp(Complex(-u * u, -pump.chirp_a * u * u));
}

Complex pump_spectrum(const PumpPulse& pump, double omega) {
  pump.validate();
  const double a = pump.chirp_a;
  const double one_a2 = 1.0 + a * a;
  const double b = pump.b();
  const Complex pref = pump.tau_D /
                       (2.0 * std::sqrt(kPi) * std::pow(one_a2, 0.25)) *
                       std::exp(Complex(0.0, -0.5 * std::atan(a)));
  return pref * std::exp(-b * Complex(1.0, -a) * omega * omega);
}

PumpPulse propagate_through_crystal(const PumpPulse& pump_in, double Dp,
                                    double length_mm) {
  pump_in.validate();
  detail::require(std::isfinite(Dp) && std::isfinite(length_mm) &&
                      length_mm >= 0.0,
                  "propagate_through_crystal: invalid Dp or length");
  const double ai = pump_in.chirp_a;
  const double a_out = ai + Dp * length_mm / (4.0 * kPi * pump_in.b());
  const double tau_out = pump_in.tau_D * std::sqrt((1.0 + a_out * a_out) /
                                                   (1.0 + ai * ai));
  return {tau_out, a_out};
}

Complex propagated_filtered_pump(const PumpPulse& pump_in, double Dp,
                                 double distance_mm, double sigma, double t) {
  pump_in.validate();
  detail::require(sigma > 0.0, "propagated_filtered_pump: sigma must be "
                               "positive (or kNoFilter)");
  const double a = pump_in.chirp_a;
  const double b = pump_in.b();
  const double inv_s2 = std::isfinite(sigma) ? 1.0 / (sigma * sigma) : 0.0;
  // Gaussian integral of the spectrum with the propagation and filter
  // factors: Int e^{-alpha Omega^2 - i Omega t} dOmega = sqrt(pi/alpha)
  // e^{-t^2/(4 alpha)}.
  const Complex alpha = Complex(b + inv_s2, -(b * a + Dp * distance_mm /
                                              (4.0 * kPi)));
  const Complex pref = pump_in.tau_D /
                       (2.0 * std::sqrt(kPi) * std::pow(1.0 + a * a, 0.25)) *
                       std::exp(Complex(0.0, -0.5 * std::atan(a)));
  return pref * principal_sqrt(kPi / alpha) *
         std::exp(-t * t / (4.0 * alpha));
}

}  // namespace spdc
