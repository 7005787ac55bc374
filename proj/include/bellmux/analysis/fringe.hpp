#pragma once
#include <vector>

#include "bellmux/analysis/maps.hpp"
#include "bellmux/core/phase.hpp"

namespace bellmux {

/// Parameters of the sliding-segment fringe fit.
struct FringeConfig {
  double smooth_sigma_x_px = 10.0;  ///< along x_s
  double smooth_sigma_y_px = 1.0;   ///< along y_s
  int segment_px = 50;
  int step_px = 1;
  double min_counts = 100.0;  ///< raw 4-port counts per segment
  int x_margin_px = 10;
  bool refine_frequency = true;
  bool correct_smoothing = true;
  bool deblur_pixelation = true;
  double freq_y = 0.0;      ///< fringe frequency seed [cycles per camera px]
  double pixel_blur = 1.0;  ///< amplitude factor from hit pixelation
};

/// Fringe frequency and pixelation blur implied by a linear phase profile.
FringeConfig make_fringe_config(const PhaseProfile& phase, const DetectorGeometry& geom);

struct VisibilityPoint {
  int sx = 0;         ///< sum-bin column
  int sy = 0;         ///< sum-bin of the segment center
  double x_s = 0.0;   ///< [rad/mm]
  double y_s = 0.0;
  double v = 0.0;
  double se = 0.0;
  double counts = 0.0;  ///< raw coincidences in the segment
  double freq = 0.0;    ///< fitted frequency [cycles per camera px]
  bool flagged = false; ///< outside [0, 1]
};

struct VisibilityMap {
  double storage_time = 0.0;
  int sum_w = 0, sum_h = 0;
  double segment_len_k = 0.0;  ///< segment length in wavevector units
  std::vector<VisibilityPoint> points;
};

/// Per-segment visibility a/b from a cosine fit of the port-pair maps,
/// averaged over the four port combinations, with the filter and
/// pixelation transfer divided out.
VisibilityMap visibility_map(const CoincidenceMap& map, const DetectorGeometry& geom,
                             const FringeConfig& cfg);

}  // namespace bellmux
