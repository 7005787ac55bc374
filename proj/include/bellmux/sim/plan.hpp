#pragma once
#include <cstdint>
#include <vector>

#include "bellmux/analytic/params.hpp"
#include "bellmux/core/geometry.hpp"
#include "bellmux/core/kernel.hpp"
#include "bellmux/core/phase.hpp"
#include "bellmux/core/types.hpp"

namespace bellmux {

enum class SimMode : std::uint8_t { physical, effective };

/// Source of the polarization visibility in effective mode.
enum class InjectMode : std::uint8_t {
  constant,  ///< fixed v_eff
  model,     ///< storage-time law with (inject_v0, inject_w, gamma)
};

struct ScheduleEntry {
  MeasurementSetting setting;
  double storage_time = 0.0;  ///< [us]
  std::uint64_t shots = 0;
};

/// Complete description of a simulation run. Output is a pure function
/// of this record; shot i of entry e draws from a stream keyed on
/// (seed, e, i) only.
struct SimulationPlan {
  SimMode mode = SimMode::physical;
  InjectMode inject = InjectMode::constant;
  double v_eff = 0.92;
  double inject_v0 = 0.92;
  double inject_w = 0.13;

  /// Physical mode: top up in-window accidental coincidences so the
  /// asymptotic fringe visibility matches the closed-form model at the
  /// configured binning.
  bool floor_calibration = true;
  double n_sigma = 1.0;  ///< analysis window the calibration targets

  std::uint64_t seed = 1;
  int threads = 0;  ///< 0 = hardware concurrency

  std::vector<ScheduleEntry> schedule;

  DetectorGeometry geom;
  CorrelationKernel kernel;
  PhaseProfile phase;
  SourceParams source;
  NoiseModel noise;
  DecoherenceParams dec;

  void validate() const;
};

struct RunDiagnostics {
  int achieved_modes = 0;
  std::uint64_t total_shots = 0;
  std::uint64_t total_hits = 0;
  std::uint64_t dropped_hits = 0;  ///< kinematics outside the pixel grid
};

}  // namespace bellmux
