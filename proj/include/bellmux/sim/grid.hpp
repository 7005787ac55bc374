#pragma once
#include "bellmux/core/geometry.hpp"
#include "bellmux/core/kernel.hpp"
#include "bellmux/sim/rng.hpp"

namespace bellmux {

/// Rectangular tiling of the observed region into mode cells. Cell
/// dimensions follow the kernel widths (2 sigma / sqrt(alpha) per axis)
/// so that the cell count approximates the Schmidt mode-pair count; the
/// achieved count is reported in run metadata.
struct ModeGrid {
  double x0 = 0.0, y0 = 0.0;
  double cell_w = 1.0, cell_h = 1.0;
  int nx = 1, ny = 1;

  static ModeGrid build(const DetectorGeometry& geom, const CorrelationKernel& kernel,
                        double alpha);

  int cell_count() const { return nx * ny; }
  double cell_area() const { return cell_w * cell_h; }

  Wavevector cell_center(int idx) const {
    const int cx = idx % nx;
    const int cy = idx / nx;
    return {x0 + (cx + 0.5) * cell_w, y0 + (cy + 0.5) * cell_h};
  }

  Wavevector sample_in_cell(int idx, RngStream& rng) const {
    const int cx = idx % nx;
    const int cy = idx / nx;
    return {x0 + (cx + rng.uniform()) * cell_w, y0 + (cy + rng.uniform()) * cell_h};
  }
};

}  // namespace bellmux
