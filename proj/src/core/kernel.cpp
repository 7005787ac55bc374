#include "bellmux/core/kernel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace bellmux {

void CorrelationKernel::validate() const {
  if (!(sigma_x > 0.0) || !(sigma_y > 0.0))
    throw std::invalid_argument("kernel: correlation widths must be > 0");
}

double correlation_density(const CorrelationKernel& kernel, Wavevector k_w, Wavevector k_r) {
  const double dx = k_w.x - k_r.x;
  const double dy = k_w.y - k_r.y;
  const double qx = dx / kernel.sigma_x;
  const double qy = dy / kernel.sigma_y;
  const double norm = 2.0 * std::numbers::pi * kernel.sigma_x * kernel.sigma_y;
  return std::exp(-0.5 * (qx * qx + qy * qy)) / norm;
}

}  // namespace bellmux
