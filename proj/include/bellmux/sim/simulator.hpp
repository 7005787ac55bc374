#pragma once
#include <span>
#include <utility>
#include <vector>

#include "bellmux/sim/grid.hpp"
#include "bellmux/sim/plan.hpp"
#include "bellmux/sim/rng.hpp"

namespace bellmux {

/// Receives generated hits in (entry, shot) order. Hits of one shot are
/// delivered contiguously, write-out arm first.
class EventSink {
 public:
  virtual ~EventSink() = default;
  virtual void accept(std::span<const PhotonHit> hits) = 0;
};

/// Collects everything into one vector.
class VectorSink final : public EventSink {
 public:
  void accept(std::span<const PhotonHit> hits) override {
    hits_.insert(hits_.end(), hits.begin(), hits.end());
  }
  const std::vector<PhotonHit>& hits() const { return hits_; }
  std::vector<PhotonHit> take() { return std::move(hits_); }

 private:
  std::vector<PhotonHit> hits_;
};

/// Generate the full event stream of a plan. Deterministic in
/// (seed, plan); independent of the thread count.
RunDiagnostics run_experiment(const SimulationPlan& plan, EventSink& sink);

// ---- sampling primitives, exposed for direct statistical tests --------

/// Thermal per-cell pair count with mean chi.
int sample_pair_counts(RngStream& rng, double chi);

/// Pair kinematics: write position uniform in the cell, read position
/// Gaussian-correlated with the kernel widths.
std::pair<Wavevector, Wavevector> sample_pair_kinematics(RngStream& rng, const ModeGrid& grid,
                                                         int cell, const CorrelationKernel& kernel);

/// Joint polarization outcome for a detected pair.
std::pair<Port, Port> sample_polarization(RngStream& rng, double v_pol, double total_phase,
                                          const MeasurementSetting& setting);

/// Per-shot survival probability of the read-out photon relative to
/// eta_r(0): average of the two branch decays at the pair position.
double pair_read_survival(double t, Wavevector k_pair, const DetectorGeometry& geom,
                          const DecoherenceParams& dec);

/// Per-mode synthetic accidental-pair rate used by the floor calibration.
/// Exposed for tests of the asymptotic coincidence budget.
double accidental_rate(const SimulationPlan& plan, const ModeGrid& grid, double t,
                       Wavevector cell_center);

}  // namespace bellmux
