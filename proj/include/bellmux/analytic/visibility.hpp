#pragma once
#include "bellmux/analytic/params.hpp"
#include "bellmux/core/geometry.hpp"

namespace bellmux {

/// Coincidence-window capture penalty F(n) = erf(n/sqrt(2))^2 / (alpha n^2)
/// for a binning half-width of n standard deviations per axis.
/// The supremum for n -> 0+ is 2/(alpha pi).
double binning_factor(double n_sigma, double alpha);

/// V = (g2 - 1)/(g2 + 1). Requires g2 >= 1.
double visibility_from_g2(double g2);

/// Inverse map, defined for V in [0, 1).
double g2_from_visibility(double v);

/// Read-arm noise per mode at storage time t:
/// b_r0 + b_r_chi * chi + (b_r_inf - b_r0) (1 - exp(-t / tau_b)).
double readout_noise(double t, double chi, const NoiseModel& noise);

/// Late-time plateau b_r_inf + b_r_chi * chi.
double readout_noise_plateau(double chi, const NoiseModel& noise);

/// Coincidence visibility with binning and per-mode noise rates:
/// V = [1 + 2 chi (1 + b_w/chi)(1 + b_r/(chi eta_r)) / F(n)]^-1.
/// b_w and b_r are the instantaneous per-mode noise rates and eta_r the
/// retrieval efficiency at the considered time.
double visibility_model_rates(double chi, double b_w, double b_r, double eta_r, double f_bin);

/// Same with b_w, b_r taken from the noise model at t = 0 and eta_r = eta_r0.
double visibility_model(const SourceParams& src, const NoiseModel& noise, double n_sigma);

/// Noise-free offset of the storage-time model, 1 / (1 + 2 chi / F(n)).
double v0_factor(double chi, double f_bin);

/// Storage-time noise weight W = 2 F(n) B / [eta_r0 (2 chi + F(n))^2].
double w_factor(double noise_b, double eta_r0, double chi, double f_bin);

/// Core storage-time law V(t) = V0 / (1 + (W/V0) exp(t^2 / tau^2)).
double visibility_storage(double t, double tau, double v0, double w);

/// Visibility reduction from unequal branch decoherence rates,
/// 1 / cosh[t^2 (|k_V|^2 - |k_H|^2) / (2 gamma^2)]. Equals 1 on the
/// balanced line |k_H| = |k_V|.
double imbalance_visibility(double t, Wavevector k_obs, const DetectorGeometry& geom,
                            const DecoherenceParams& dec);

/// Which branch modulus drives the retrieval decay in the storage-time model.
enum class SurvivalModel {
  mean_k,       ///< exp(-t^2 (|k| t / gamma)^2) at |k| = (|k_H| + |k_V|)/2
  min_k,        ///< slower branch only
  max_k,        ///< faster branch only
  h_only,       ///< |k_H|
  branch_mean,  ///< average of the two branch survivals
};

/// Which read-noise value enters the storage-time model.
enum class NoiseTimeModel {
  instantaneous,  ///< b_r(t) from the rise law
  plateau,        ///< constant late-time plateau
};

/// Full storage-time visibility at an observed map point: the product of
/// the storage-time law (with time-dependent retrieval and read noise)
/// and the branch-imbalance factor.
double visibility_vs_time(double t, Wavevector k_obs, const SourceParams& src,
                          const NoiseModel& noise, const DecoherenceParams& dec, double n_sigma,
                          const DetectorGeometry& geom,
                          SurvivalModel survival = SurvivalModel::mean_k,
                          NoiseTimeModel noise_time = NoiseTimeModel::instantaneous);

/// Retrieval survival factor eta_r(t,k)/eta_r(0) for a chosen model.
double retrieval_survival(double t, Wavevector k_obs, const DetectorGeometry& geom,
                          const DecoherenceParams& dec, SurvivalModel survival);

/// Mean of visibility_vs_time over a y_s segment of the given length,
/// centered on k_obs: the quantity a constant-amplitude fringe fit
/// estimates when the visibility varies across the segment.
double visibility_vs_time_segment(double t, Wavevector k_obs, double segment_len_y, int n_sub,
                                  const SourceParams& src, const NoiseModel& noise,
                                  const DecoherenceParams& dec, double n_sigma,
                                  const DetectorGeometry& geom,
                                  SurvivalModel survival = SurvivalModel::branch_mean,
                                  NoiseTimeModel noise_time = NoiseTimeModel::instantaneous);

}  // namespace bellmux
