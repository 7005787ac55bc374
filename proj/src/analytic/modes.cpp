#include "bellmux/analytic/modes.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace bellmux {

double mode_count(double area, const CorrelationKernel& kernel, double alpha) {
  if (!(area > 0.0)) throw std::domain_error("mode_count: area must be > 0");
  kernel.validate();
  return alpha * area / (4.0 * kernel.sigma_x * kernel.sigma_y);
}

double collision_probability(int n_px, int k_photons) {
  if (n_px < 1) throw std::domain_error("collision_probability: n_px must be >= 1");
  if (k_photons < 0) throw std::domain_error("collision_probability: k must be >= 0");
  if (k_photons > n_px) return 1.0;
  double no_collision = 1.0;
  for (int i = 1; i < k_photons; ++i) no_collision *= 1.0 - static_cast<double>(i) / n_px;
  return 1.0 - no_collision;
}

double crosstalk_probability(const SourceParams& src, double sigma_px, int n_px, int modes) {
  if (modes < 1) throw std::domain_error("crosstalk_probability: modes must be >= 1");
  const double r = 3.0 * sigma_px;
  const double per_mode = src.chi * src.eta_r0 * src.eta_w * std::numbers::pi * r * r / n_px;
  if (per_mode < 0.0 || per_mode > 1.0)
    throw std::domain_error("crosstalk_probability: per-mode term outside [0, 1]");
  return 1.0 - std::pow(1.0 - per_mode, modes - 1);
}

double success_probability(double eta, double chi, int modes) {
  const double p = eta * chi;
  if (p < 0.0 || p > 1.0)
    throw std::domain_error("success_probability: eta*chi must lie in [0, 1]");
  if (modes < 0) throw std::domain_error("success_probability: modes must be >= 0");
  return 1.0 - std::pow(1.0 - p, modes);
}

}  // namespace bellmux
