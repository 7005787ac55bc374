#include "bellmux/analytic/decoherence.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace bellmux {

void DecoherenceParams::validate() const {
  if (!(gamma > 0.0)) throw std::invalid_argument("decoherence: gamma must be > 0");
  if (!(temp_cal > 0.0)) throw std::invalid_argument("decoherence: temp_cal must be > 0");
}

DecoherenceResult decoherence(double t, double k_modulus, const DecoherenceParams& dec) {
  if (!(t >= 0.0)) throw std::domain_error("decoherence: t must be >= 0");
  if (k_modulus < 0.0) throw std::domain_error("decoherence: |k| must be >= 0");
  if (k_modulus == 0.0) return {std::numeric_limits<double>::infinity(), 1.0};
  const double tau = dec.gamma / k_modulus;
  const double x = t / tau;
  return {tau, std::exp(-x * x)};
}

double temperature_from_gamma(double gamma, const DecoherenceParams& dec) {
  if (!(gamma > 0.0)) throw std::domain_error("temperature_from_gamma: gamma must be > 0");
  return dec.temp_cal / (gamma * gamma);
}

double gamma_from_temperature(double temperature, const DecoherenceParams& dec) {
  if (!(temperature > 0.0))
    throw std::domain_error("gamma_from_temperature: temperature must be > 0");
  return std::sqrt(dec.temp_cal / temperature);
}

}  // namespace bellmux
