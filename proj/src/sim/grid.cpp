#include "bellmux/sim/grid.hpp"

#include <algorithm>
#include <cmath>

namespace bellmux {

ModeGrid ModeGrid::build(const DetectorGeometry& geom, const CorrelationKernel& kernel,
                         double alpha) {
  const double target_w = 2.0 * kernel.sigma_x / std::sqrt(alpha);
  const double target_h = 2.0 * kernel.sigma_y / std::sqrt(alpha);
  ModeGrid g;
  g.x0 = geom.x_min();
  g.y0 = geom.y_min();
  g.nx = std::max(1, static_cast<int>(std::lround(geom.width_k() / target_w)));
  g.ny = std::max(1, static_cast<int>(std::lround(geom.height_k() / target_h)));
  g.cell_w = geom.width_k() / g.nx;
  g.cell_h = geom.height_k() / g.ny;
  return g;
}

}  // namespace bellmux
