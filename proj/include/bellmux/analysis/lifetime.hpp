#pragma once
#include <vector>

#include "bellmux/analysis/fringe.hpp"
#include "bellmux/analytic/params.hpp"

namespace bellmux {

struct VisSample {
  double x_s = 0.0, y_s = 0.0, t = 0.0, v = 0.0, se = 1.0;
  double seg_len = 0.0;  ///< y_s extent of the segment behind the estimate
};

/// Flatten visibility maps into weighted samples for model fits.
std::vector<VisSample> collect_vis_samples(const std::vector<VisibilityMap>& maps);

struct DecoherenceFit {
  double v0 = 0.0, w = 0.0, gamma = 0.0;
  double v0_se = 0.0, w_se = 0.0, gamma_se = 0.0;
  double temperature = 0.0, temperature_se = 0.0;
  double chi2 = 0.0;
  int n_points = 0;
  int iterations = 0;
};

/// Weighted nonlinear least squares of the storage-time visibility model
/// (decay at the mean branch modulus times the branch-imbalance factor)
/// over all map points, with shared (V0, W, gamma). The kernel enters the
/// within-segment count weighting near the map edges.
DecoherenceFit fit_decoherence(const std::vector<VisibilityMap>& maps,
                               const DetectorGeometry& geom, const CorrelationKernel& kernel,
                               const DecoherenceParams& cal);

/// The fitted model itself, exposed for map synthesis and residual checks.
double decoherence_model(double t, Wavevector k_obs, const DetectorGeometry& geom, double v0,
                         double w, double gamma);

struct TauBin {
  double k_center = 0.0;
  double tau = 0.0, tau_se = 0.0;
  int n_points = 0;
  bool used = false;
};

struct TauKFit {
  std::vector<TauBin> bins;
  double v0 = 0.0, w = 0.0;
  double v0_se = 0.0, w_se = 0.0;
  double gamma = 0.0, gamma_se = 0.0;
  double temperature = 0.0;
  int n_excluded_bins = 0;
  double chi2 = 0.0;
};

/// Joint fit over the balanced band |y_s - y_max/2| <= band_halfwidth:
/// shared (V0, W), one lifetime per |k| bin, then gamma from
/// tau(k) = gamma/|k| across bins.
TauKFit tau_vs_k(const std::vector<VisibilityMap>& maps, const DetectorGeometry& geom,
                 const CorrelationKernel& kernel, const DecoherenceParams& cal,
                 double band_halfwidth, int n_bins, double gamma_seed);

}  // namespace bellmux
