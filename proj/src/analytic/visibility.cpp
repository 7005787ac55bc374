#include "bellmux/analytic/visibility.hpp"

#include <cmath>
#include <stdexcept>

#include "bellmux/analytic/decoherence.hpp"

namespace bellmux {

void SourceParams::validate() const {
  if (!(chi > 0.0) || chi > 0.2)
    throw std::invalid_argument("source: chi must lie in (0, 0.2]");
  if (!(eta_w > 0.0) || eta_w > 1.0 || !(eta_r0 > 0.0) || eta_r0 > 1.0 || !(eta_d > 0.0) ||
      eta_d > 1.0)
    throw std::invalid_argument("source: efficiencies must lie in (0, 1]");
  if (!(alpha > 0.0)) throw std::invalid_argument("source: alpha must be > 0");
}

void NoiseModel::validate() const {
  if (b_w < 0.0 || b_r0 < 0.0 || b_r_inf < 0.0 || b_r_chi < 0.0)
    throw std::invalid_argument("noise: rates must be >= 0");
  if (!(tau_b > 0.0)) throw std::invalid_argument("noise: tau_b must be > 0");
  if (b_r_inf < b_r0)
    throw std::invalid_argument("noise: b_r_inf must be >= b_r0 (nondecreasing rise)");
}

double binning_factor(double n_sigma, double alpha) {
  if (!(n_sigma > 0.0)) throw std::domain_error("binning_factor: n_sigma must be > 0");
  const double e = std::erf(n_sigma / std::sqrt(2.0));
  return e * e / (alpha * n_sigma * n_sigma);
}

double visibility_from_g2(double g2) {
  if (!(g2 >= 1.0)) throw std::domain_error("visibility_from_g2: requires g2 >= 1");
  return (g2 - 1.0) / (g2 + 1.0);
}

double g2_from_visibility(double v) {
  if (!(v >= 0.0) || !(v < 1.0))
    throw std::domain_error("g2_from_visibility: requires V in [0, 1)");
  return (1.0 + v) / (1.0 - v);
}

double readout_noise(double t, double chi, const NoiseModel& noise) {
  if (!(t >= 0.0)) throw std::domain_error("readout_noise: t must be >= 0");
  return noise.b_r0 + noise.b_r_chi * chi +
         (noise.b_r_inf - noise.b_r0) * (1.0 - std::exp(-t / noise.tau_b));
}

double readout_noise_plateau(double chi, const NoiseModel& noise) {
  return noise.b_r_inf + noise.b_r_chi * chi;
}

double visibility_model_rates(double chi, double b_w, double b_r, double eta_r, double f_bin) {
  if (!(chi > 0.0) || !(eta_r > 0.0))
    throw std::domain_error("visibility_model: chi and eta_r must be > 0");
  const double deficit =
      2.0 * chi * (1.0 + b_w / chi) * (1.0 + b_r / (chi * eta_r)) / f_bin;
  return 1.0 / (1.0 + deficit);
}

double visibility_model(const SourceParams& src, const NoiseModel& noise, double n_sigma) {
  const double f = binning_factor(n_sigma, src.alpha);
  return visibility_model_rates(src.chi, noise.b_w, readout_noise(0.0, src.chi, noise),
                                src.eta_r0, f);
}

double v0_factor(double chi, double f_bin) { return 1.0 / (1.0 + 2.0 * chi / f_bin); }

double w_factor(double noise_b, double eta_r0, double chi, double f_bin) {
  const double s = 2.0 * chi + f_bin;
  return 2.0 * f_bin * noise_b / (eta_r0 * s * s);
}

double visibility_storage(double t, double tau, double v0, double w) {
  const double q = (t / tau) * (t / tau);
  return v0 / (1.0 + (w / v0) * std::exp(q));
}

double imbalance_visibility(double t, Wavevector k_obs, const DetectorGeometry& geom,
                            const DecoherenceParams& dec) {
  const auto [kh, kv] = branch_moduli(k_obs, geom);
  const double arg = t * t * (kv * kv - kh * kh) / (2.0 * dec.gamma * dec.gamma);
  return 1.0 / std::cosh(arg);
}

double retrieval_survival(double t, Wavevector k_obs, const DetectorGeometry& geom,
                          const DecoherenceParams& dec, SurvivalModel survival) {
  const auto [kh, kv] = branch_moduli(k_obs, geom);
  const auto decay = [&](double k) {
    const double x = t * k / dec.gamma;
    return std::exp(-x * x);
  };
  switch (survival) {
    case SurvivalModel::mean_k:
      return decay(0.5 * (kh + kv));
    case SurvivalModel::min_k:
      return decay(std::min(kh, kv));
    case SurvivalModel::max_k:
      return decay(std::max(kh, kv));
    case SurvivalModel::h_only:
      return decay(kh);
    case SurvivalModel::branch_mean:
      return 0.5 * (decay(kh) + decay(kv));
  }
  return 1.0;
}

double visibility_vs_time_segment(double t, Wavevector k_obs, double segment_len_y, int n_sub,
                                  const SourceParams& src, const NoiseModel& noise,
                                  const DecoherenceParams& dec, double n_sigma,
                                  const DetectorGeometry& geom, SurvivalModel survival,
                                  NoiseTimeModel noise_time) {
  const double y_lo = std::max(geom.y_min(), k_obs.y - 0.5 * segment_len_y);
  const double y_hi = std::min(0.5 * geom.y_max, k_obs.y + 0.5 * segment_len_y);
  double acc = 0.0;
  for (int j = 0; j < n_sub; ++j) {
    const double y = y_lo + (j + 0.5) * (y_hi - y_lo) / n_sub;
    acc += visibility_vs_time(t, {k_obs.x, y}, src, noise, dec, n_sigma, geom, survival,
                              noise_time);
  }
  return acc / n_sub;
}

double visibility_vs_time(double t, Wavevector k_obs, const SourceParams& src,
                          const NoiseModel& noise, const DecoherenceParams& dec, double n_sigma,
                          const DetectorGeometry& geom, SurvivalModel survival,
                          NoiseTimeModel noise_time) {
  const double f = binning_factor(n_sigma, src.alpha);
  const double b_r = noise_time == NoiseTimeModel::plateau
                         ? readout_noise_plateau(src.chi, noise)
                         : readout_noise(t, src.chi, noise);
  const double s = retrieval_survival(t, k_obs, geom, dec, survival);
  const double v = visibility_model_rates(src.chi, noise.b_w, b_r, src.eta_r0 * s, f);
  return v * imbalance_visibility(t, k_obs, geom, dec);
}

}  // namespace bellmux
