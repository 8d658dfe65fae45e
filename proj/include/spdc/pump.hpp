#pragma once

// Chirped Gaussian pump pulse: time-domain envelope, its analytic spectrum,
// the chirp/duration transformation accumulated by second-order dispersion
// across the crystal, and the spectrally filtered, dispersed field used by
// the pump-autocorrelation representation of the coincidence rate.

#include "spdc/types.hpp"

namespace spdc {

// Envelope at the reference plane, unit peak amplitude:
//   E(t) = exp(-(1 + i a) t^2 / tau_D^2).
Complex pump_envelope(const PumpPulse& pump, double t);

// Spectrum with the convention E~(Omega) = (1/2pi) Int E(t) e^{i Omega t} dt:
//   E~(Omega) = tau_D / (2 sqrt(pi) (1+a^2)^{1/4}) e^{-i atan(a)/2}
//               * exp(-(tau_D^2 / (4 (1+a^2))) (1 - i a) Omega^2).
Complex pump_spectrum(const PumpPulse& pump, double omega);

// Duration/chirp at the crystal output plane after propagating length_mm
// through a medium with second-order dispersion Dp (s^2/mm):
//   a_out   = a_in + Dp * length / (4 pi b_in),
//   tau_out = tau_in sqrt((1 + a_out^2) / (1 + a_in^2));
// b is invariant under this transformation.
PumpPulse propagate_through_crystal(const PumpPulse& pump_in, double Dp,
                                    double length_mm);

// Field of the pump after propagating distance_mm with dispersion Dp and
// passing a Gaussian spectral filter exp(-Omega^2/sigma^2) (sigma may be
// kNoFilter):
//   E(zeta, t) = Int dOmega E~(Omega) e^{i Dp zeta Omega^2 / 4 pi}
//                e^{-Omega^2/sigma^2} e^{-i Omega t}
// evaluated in closed form for the Gaussian pump.
Complex propagated_filtered_pump(const PumpPulse& pump_in, double Dp,
                                 double distance_mm, double sigma, double t);

}  // namespace spdc
