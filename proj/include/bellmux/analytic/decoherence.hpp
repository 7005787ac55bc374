#pragma once
#include "bellmux/analytic/params.hpp"

namespace bellmux {

struct DecoherenceResult {
  double tau;        ///< characteristic time gamma/|k| [us]; +inf at |k| = 0
  double eta_ratio;  ///< retrieval survival exp(-t^2/tau^2), in (0, 1]
};

/// Thermal-motion decoherence of a spin wave of modulus |k| after time t.
DecoherenceResult decoherence(double t, double k_modulus, const DecoherenceParams& dec);

/// Calibrated temperature T = temp_cal / gamma^2 [uK].
double temperature_from_gamma(double gamma, const DecoherenceParams& dec);

/// Inverse map gamma = sqrt(temp_cal / T).
double gamma_from_temperature(double temperature, const DecoherenceParams& dec);

}  // namespace bellmux
