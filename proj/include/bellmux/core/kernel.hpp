#pragma once
#include "bellmux/core/geometry.hpp"

namespace bellmux {

/// Gaussian write/read wavevector correlation, separable in the
/// difference coordinates. Widths are the standard deviations of the
/// coincidence density [rad/mm].
struct CorrelationKernel {
  double sigma_x = 6.2594;
  double sigma_y = 6.2594;

  void validate() const;
};

/// Probability density of the pair difference (k_w - k_r), normalized to
/// unit integral over the difference plane. Peaks at k_r = k_w with value
/// 1 / (2 pi sigma_x sigma_y).
double correlation_density(const CorrelationKernel& kernel, Wavevector k_w, Wavevector k_r);

}  // namespace bellmux
