#include "bellmux/core/geometry.hpp"

#include <stdexcept>
#include <string>

namespace bellmux {

void DetectorGeometry::validate() const {
  if (!(pixel_pitch > 0.0)) throw std::invalid_argument("geometry: pixel_pitch must be > 0");
  if (width_px < 1 || height_px < 1)
    throw std::invalid_argument("geometry: pixel counts must be >= 1");
  if (!(y_max > 0.0)) throw std::invalid_argument("geometry: y_max must be > 0");
  if (origin_y < 0.0) throw std::invalid_argument("geometry: origin_y must be >= 0");
  const double top = y_top();
  if (top > 0.5 * y_max + 1e-9)
    throw std::invalid_argument("geometry: observed region exceeds folded range [0, y_max/2], top=" +
                                std::to_string(top) + " y_max/2=" + std::to_string(0.5 * y_max));
}

FoldedPoint fold_coordinates(Wavevector k_raw, const DetectorGeometry& geom) {
  if (!(k_raw.y >= 0.0) || !(k_raw.y <= geom.y_max))
    throw std::domain_error("fold_coordinates: y outside [0, y_max]");
  if (k_raw.y < 0.5 * geom.y_max) return {k_raw, Branch::H};
  return {{k_raw.x, geom.y_max - k_raw.y}, Branch::V};
}

Wavevector unfold_coordinates(Wavevector k_obs, Branch branch, const DetectorGeometry& geom) {
  if (branch == Branch::H) return k_obs;
  return {k_obs.x, geom.y_max - k_obs.y};
}

std::pair<double, double> branch_moduli(Wavevector k_obs, const DetectorGeometry& geom) {
  if (k_obs.y < 0.0 || k_obs.y > 0.5 * geom.y_max + 1e-9)
    throw std::domain_error("branch_moduli: point outside folded region");
  const double kh = std::hypot(k_obs.x, k_obs.y);
  const double kv = std::hypot(k_obs.x, geom.y_max - k_obs.y);
  return {kh, kv};
}

}  // namespace bellmux
