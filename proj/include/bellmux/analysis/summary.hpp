#pragma once
#include "bellmux/analysis/fringe.hpp"

namespace bellmux {

struct ModeSummary {
  double fraction_violating = 0.0;  ///< share of points with V > 1/sqrt(2)
  double fraction_se = 0.0;
  double mean_violating = 0.0;  ///< mean V over that subset
  double mean_violating_se = 0.0;
  double mean_all = 0.0;  ///< mean V over all points
  double mean_all_se = 0.0;
  int n_points = 0;
  bool valid = false;
};

/// Point-level summary of a visibility map with bootstrap standard
/// errors (resampling seeded from `seed`).
ModeSummary mode_summary(const VisibilityMap& map, std::uint64_t seed, int n_bootstrap = 200);

}  // namespace bellmux
