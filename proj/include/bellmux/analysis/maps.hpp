#pragma once
#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "bellmux/core/geometry.hpp"
#include "bellmux/core/kernel.hpp"
#include "bellmux/core/types.hpp"
#include "bellmux/sim/simulator.hpp"

namespace bellmux {

/// Coincidence and singles tallies for one schedule entry. Coincidences
/// live on the sum-coordinate grid at half-pixel pitch: bin index
/// sx = ix_w + ix_r in [0, 2 width - 2], and analogously in y. A
/// write/read hit pair of one shot contributes when the pixel difference
/// passes the +-m cut on both axes.
struct CoincidenceMap {
  int width_px = 0;
  int height_px = 0;
  int m_x = 0;  ///< difference cut half-width [px]
  int m_y = 0;
  std::uint16_t basis = 0;
  double storage_time = 0.0;
  std::uint64_t n_shots = 0;

  /// Port-pair order (s_w, s_r): (+,+), (+,-), (-,+), (-,-).
  std::array<std::vector<std::uint32_t>, 4> ports;
  std::vector<std::uint32_t> singles_w;  ///< per camera pixel
  std::vector<std::uint32_t> singles_r;

  int sum_w() const { return 2 * width_px - 1; }
  int sum_h() const { return 2 * height_px - 1; }
  std::size_t sum_bins() const { return static_cast<std::size_t>(sum_w()) * sum_h(); }

  static int port_index(Port w, Port r) {
    return (w == Port::plus ? 0 : 2) + (r == Port::plus ? 0 : 1);
  }

  std::uint64_t port_total(int sx, int sy) const {
    const std::size_t at = static_cast<std::size_t>(sy) * sum_w() + sx;
    std::uint64_t n = 0;
    for (const auto& v : ports) n += v[at];
    return n;
  }

  /// Physical sum coordinate of a bin center [rad/mm].
  double x_s(const DetectorGeometry& geom, int sx) const {
    return geom.origin_x + (sx * 0.5 + 0.5) * geom.pixel_pitch;
  }
  double y_s(const DetectorGeometry& geom, int sy) const {
    return geom.origin_y + (sy * 0.5 + 0.5) * geom.pixel_pitch;
  }

  void merge(const CoincidenceMap& other);
};

/// Shot counts and storage times per schedule entry; required because
/// shots without hits never appear in the event stream.
struct ScheduleMeta {
  std::vector<double> times;
  std::vector<std::uint64_t> shots;
  std::vector<MeasurementSetting> settings;

  std::size_t size() const { return times.size(); }
};

struct AccumulationResult {
  std::vector<CoincidenceMap> maps;  ///< one per schedule entry
  std::uint64_t skipped_records = 0;
};

/// Streaming accumulator; also usable as a simulator sink. Events must
/// arrive grouped by shot (the event-file order).
class CoincidenceAccumulator final : public EventSink {
 public:
  CoincidenceAccumulator(const DetectorGeometry& geom, const CorrelationKernel& kernel,
                         double n_sigma, const ScheduleMeta& meta);

  void accept(std::span<const PhotonHit> hits) override;
  AccumulationResult finish();

 private:
  void flush_shot();

  DetectorGeometry geom_;
  ScheduleMeta meta_;
  AccumulationResult result_;
  std::vector<PhotonHit> pending_;
  std::uint64_t current_shot_ = 0;
  bool have_shot_ = false;
};

/// One-call accumulation of an in-memory, shot-grouped event stream.
AccumulationResult accumulate_coincidences(std::span<const PhotonHit> events,
                                           const DetectorGeometry& geom,
                                           const CorrelationKernel& kernel, double n_sigma,
                                           const ScheduleMeta& meta);

struct G2Estimate {
  double g2 = 0.0;
  double se = 0.0;
  std::uint64_t coincidences = 0;
  bool valid = false;
};

/// Cross-correlation over a rectangular sum-bin region [sx0,sx1) x [sy0,sy1):
/// g2 = N * (windowed coincidences) / (windowed singles pair product).
G2Estimate estimate_g2(const CoincidenceMap& map, int sx0, int sx1, int sy0, int sy1);

/// g2 of the whole map.
G2Estimate estimate_g2(const CoincidenceMap& map);

/// Mean of (g2-1)/(g2+1) over square tiles of the map, inverse-variance
/// weighted. Tiles with fewer than min_coincidences are skipped.
struct G2VisibilityAverage {
  double mean = 0.0;
  double se = 0.0;
  int tiles = 0;
  bool valid = false;
};
G2VisibilityAverage g2_visibility_average(const CoincidenceMap& map, int tile_px,
                                          std::uint64_t min_coincidences, int x_margin_px = 0,
                                          int y_margin_px = 0);

struct ExpectedValueMap {
  int sum_w = 0, sum_h = 0;
  std::vector<double> e;          ///< masked bins hold 0
  std::vector<double> se;         ///< binomial propagation
  std::vector<std::uint32_t> n;   ///< total coincidences per bin
  std::vector<std::uint8_t> ok;   ///< 1 where defined
};

/// Per-bin correlation E = (C++ - C+- - C-+ + C--) / total.
ExpectedValueMap expected_value_map(const CoincidenceMap& map);

/// Two-setting visibility (p_plus - p_minus) / (p_plus + p_minus).
/// Returns false when the denominator vanishes.
bool visibility_two_setting(double p_plus, double p_minus, double& v_out);

}  // namespace bellmux
