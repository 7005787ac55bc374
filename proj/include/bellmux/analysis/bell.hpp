#pragma once
#include <array>
#include <vector>

#include "bellmux/analysis/maps.hpp"
#include "bellmux/core/phase.hpp"

namespace bellmux {

struct BellConfig {
  double freq_x = 0.0;  ///< E-map modulation [cycles per camera px]
  double freq_y = 0.0;
  double pixel_blur = 1.0;
  std::uint32_t min_counts = 8;  ///< per sum bin for the direct combination
  bool refine_frequency = true;
  bool deblur_pixelation = true;
};

BellConfig make_bell_config(const PhaseProfile& phase, const DetectorGeometry& geom);

struct BellMapResult {
  int sum_w = 0, sum_h = 0;
  std::vector<double> s_fit;        ///< combination of fitted E surfaces
  std::vector<double> s_raw;        ///< direct per-bin combination
  std::vector<std::uint8_t> ok;     ///< bins where all four E values exist
  std::vector<double> s_avg;        ///< x-averaged trace per sum row
  std::vector<double> s_avg_se;
  std::vector<std::uint8_t> s_avg_ok;
  double amplitude = 0.0;     ///< fitted sinusoid amplitude of the trace
  double amplitude_se = 0.0;
  double fitted_freq_y = 0.0; ///< [cycles per camera px]
};

/// Bell-parameter map from expected-value maps of the four basis
/// combinations, ordered (w1,r1), (w1,r2), (w2,r1), (w2,r2); the last
/// carries the negative sign.
BellMapResult bell_map(const std::array<const CoincidenceMap*, 4>& maps,
                       const DetectorGeometry& geom, const BellConfig& cfg);

}  // namespace bellmux
