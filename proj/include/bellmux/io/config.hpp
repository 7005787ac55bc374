#pragma once
#include <map>
#include <string>
#include <vector>

#include "bellmux/analysis/fringe.hpp"
#include "bellmux/io/errors.hpp"
#include "bellmux/sim/plan.hpp"

namespace bellmux {

/// Analysis-pipeline parameters shared by the CLI tasks.
struct AnalysisParams {
  double n_sigma = 1.0;
  double smooth_sigma_x_px = 10.0;
  double smooth_sigma_y_px = 1.0;
  int segment_px = 50;
  int segment_step_px = 1;
  double min_counts = 100.0;
  int x_margin_px = 10;
  bool refine_frequency = true;
  bool correct_smoothing = true;
  bool deblur_pixelation = true;
  double band_halfwidth_px = 12.0;
  int k_bins = 6;
  int g2_tile_px = 10;
  std::uint64_t g2_min_coincidences = 100;
  std::uint32_t bell_min_counts = 8;
};

/// Flat `key = value` configuration with a fixed schema. Unknown keys
/// are errors; every key has a documented default. Parse -> serialize ->
/// parse is the identity.
class Config {
 public:
  struct SchemaEntry {
    const char* key;
    const char* type;  // "double", "int", "bool", "string"
    const char* def;
    const char* doc;
  };

  static const std::vector<SchemaEntry>& schema();
  static Config defaults();
  static Config parse_file(const std::string& path);
  static Config parse_string(const std::string& text, const std::string& source = "<string>");

  std::string serialize() const;
  static std::string schema_text();  ///< commented reference listing

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  const std::string& raw(const std::string& key) const;
  void set(const std::string& key, const std::string& value);

  double get_double(const std::string& key) const;
  int get_int(const std::string& key) const;
  std::uint64_t get_u64(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  std::string get_string(const std::string& key) const;

  // Typed views over the flat keys.
  DetectorGeometry geometry() const;
  CorrelationKernel kernel() const;
  PhaseProfile phase() const;
  SourceParams source() const;
  NoiseModel noise() const;
  DecoherenceParams decoherence() const;
  AnalysisParams analysis() const;

  /// Full simulation plan including the schedule derived from
  /// schedule.type / schedule.times / schedule.t0 and sim.shots.
  SimulationPlan plan() const;

  /// Fringe-fit configuration for this geometry and phase profile.
  FringeConfig fringe() const;

 private:
  std::map<std::string, std::string> values_;  // always complete
};

}  // namespace bellmux
