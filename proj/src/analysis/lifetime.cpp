#include "bellmux/analysis/lifetime.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "bellmux/analysis/levmar.hpp"
#include "bellmux/analytic/decoherence.hpp"
#include "bellmux/sim/simulator.hpp"

namespace bellmux {

std::vector<VisSample> collect_vis_samples(const std::vector<VisibilityMap>& maps) {
  std::vector<VisSample> out;
  for (const auto& m : maps)
    for (const auto& p : m.points) {
      if (!(p.se > 0.0) || !std::isfinite(p.v)) continue;
      out.push_back({p.x_s, p.y_s, m.storage_time, p.v, p.se, m.segment_len_k});
    }
  return out;
}

namespace {

constexpr int kSubsteps = 8;

/// Geometry of one sample, resolved along the segment the fringe fit
/// spanned. The measured value is a count-weighted average over the
/// segment, so the model is averaged the same way, weighted by the
/// retrieval survival.
struct SamplePath {
  double t = 0.0;
  double v = 0.0;
  double inv_se = 1.0;
  std::array<double, kSubsteps> kbar{};
  std::array<double, kSubsteps> dk2{};
  std::array<double, kSubsteps> weight{};
};

double norm_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

SamplePath make_path(const VisSample& s, const DetectorGeometry& geom,
                     const CorrelationKernel& kernel, const DecoherenceParams& dec) {
  SamplePath p;
  p.t = s.t;
  p.v = s.v;
  p.inv_se = 1.0 / s.se;
  const double y_lo = std::max(geom.y_min(), s.y_s - 0.5 * s.seg_len);
  const double y_hi = std::min(0.5 * geom.y_max, s.y_s + 0.5 * s.seg_len);
  for (int j = 0; j < kSubsteps; ++j) {
    const double y = y_lo + (j + 0.5) * (y_hi - y_lo) / kSubsteps;
    const auto [kh, kv] = branch_moduli({s.x_s, y}, geom);
    p.kbar[j] = 0.5 * (kh + kv);
    p.dk2[j] = kv * kv - kh * kh;
    // Counts weight the fringe estimate by retrieval survival and by the
    // read-photon retention near the top and bottom map edges.
    const double retention = norm_cdf((geom.y_top() - y) / kernel.sigma_y) -
                             norm_cdf((geom.y_min() - y) / kernel.sigma_y);
    p.weight[j] = pair_read_survival(s.t, {s.x_s, y}, geom, dec) * retention;
  }
  return p;
}

struct ModelTerms {
  double value;
  double d_v0, d_w, d_decay;  // d_decay w.r.t. the decay scale s, where
                              // both exponents scale as 1/s^2
};

ModelTerms eval_point(double v0, double w, double q, double z, double scale) {
  const double e = std::exp(q);
  const double den = v0 + w * e;
  const double m28 = v0 * v0 / den;
  const double sech = 1.0 / std::cosh(z);
  const double tanh_z = std::tanh(z);
  ModelTerms out;
  out.value = m28 * sech;
  out.d_v0 = v0 * (v0 + 2.0 * w * e) / (den * den) * sech;
  out.d_w = -v0 * v0 * e / (den * den) * sech;
  const double dm28_dq = -v0 * v0 * w * e / (den * den);
  const double dsech_dz = -sech * tanh_z;
  out.d_decay = (2.0 / scale) * (-q * dm28_dq * sech - z * m28 * dsech_dz);
  return out;
}

/// Survival-weighted segment average of the storage-time model. The decay
/// exponent q_j = (t kbar_j / gamma)^2 uses kbar_scale = gamma; for the
/// per-bin lifetime variant pass the bin's implied gamma.
ModelTerms eval_path(const SamplePath& p, double v0, double w, double gamma, double scale) {
  ModelTerms acc{0.0, 0.0, 0.0, 0.0};
  double wsum = 0.0;
  for (int j = 0; j < kSubsteps; ++j) {
    const double q = (p.t * p.kbar[j] / gamma) * (p.t * p.kbar[j] / gamma);
    const double z = p.t * p.t * p.dk2[j] / (2.0 * gamma * gamma);
    const ModelTerms m = eval_point(v0, w, q, z, scale);
    const double wt = p.weight[j];
    acc.value += wt * m.value;
    acc.d_v0 += wt * m.d_v0;
    acc.d_w += wt * m.d_w;
    acc.d_decay += wt * m.d_decay;
    wsum += wt;
  }
  const double inv = 1.0 / std::max(wsum, 1e-300);
  acc.value *= inv;
  acc.d_v0 *= inv;
  acc.d_w *= inv;
  acc.d_decay *= inv;
  return acc;
}

}  // namespace

double decoherence_model(double t, Wavevector k_obs, const DetectorGeometry& geom, double v0,
                         double w, double gamma) {
  const auto [kh, kv] = branch_moduli(k_obs, geom);
  const double kbar = 0.5 * (kh + kv);
  const double q = (t * kbar / gamma) * (t * kbar / gamma);
  const double z = t * t * (kv * kv - kh * kh) / (2.0 * gamma * gamma);
  const double e = std::exp(q);
  return v0 * v0 / (v0 + w * e) / std::cosh(z);
}

DecoherenceFit fit_decoherence(const std::vector<VisibilityMap>& maps,
                               const DetectorGeometry& geom, const CorrelationKernel& kernel,
                               const DecoherenceParams& cal) {
  const auto samples = collect_vis_samples(maps);
  std::set<double> times;
  for (const auto& s : samples) times.insert(s.t);
  if (times.size() < 3)
    throw std::runtime_error("fit_decoherence: need at least 3 storage times, have " +
                             std::to_string(times.size()));
  const int n = static_cast<int>(samples.size());

  std::vector<SamplePath> paths;
  paths.reserve(n);
  for (const auto& s : samples) paths.push_back(make_path(s, geom, kernel, cal));

  const auto residuals = [&](const Eigen::VectorXd& p, Eigen::VectorXd& r, Eigen::MatrixXd* jac) {
    const double v0 = p[0], w = p[1], gamma = p[2];
    for (int i = 0; i < n; ++i) {
      const ModelTerms m = eval_path(paths[i], v0, w, gamma, gamma);
      r[i] = (m.value - paths[i].v) * paths[i].inv_se;
      if (jac) {
        (*jac)(i, 0) = m.d_v0 * paths[i].inv_se;
        (*jac)(i, 1) = m.d_w * paths[i].inv_se;
        (*jac)(i, 2) = m.d_decay * paths[i].inv_se;
      }
    }
  };

  // Deterministic seeding: offset from the earliest map, decay scale from
  // a coarse grid.
  double v0_seed = 0.0;
  {
    const double t_min = *times.begin();
    std::vector<double> first;
    for (const auto& s : samples)
      if (s.t == t_min) first.push_back(s.v);
    std::sort(first.begin(), first.end());
    v0_seed = std::clamp(first[first.size() * 9 / 10], 0.3, 0.99);
  }
  Eigen::VectorXd best(3);
  double best_cost = -1.0;
  for (const double g : {2.0e3, 4.0e3, 6.0e3, 9.0e3, 1.4e4}) {
    Eigen::VectorXd p(3);
    p << v0_seed, 0.1, g;
    Eigen::VectorXd r(n);
    residuals(p, r, nullptr);
    const double c = r.squaredNorm();
    if (best_cost < 0.0 || c < best_cost) {
      best_cost = c;
      best = p;
    }
  }

  const LevMarResult res = levmar_fit(residuals, best, n);
  DecoherenceFit out;
  out.v0 = res.params[0];
  out.w = res.params[1];
  out.gamma = res.params[2];
  out.v0_se = std::sqrt(std::max(res.covariance(0, 0), 0.0));
  out.w_se = std::sqrt(std::max(res.covariance(1, 1), 0.0));
  out.gamma_se = std::sqrt(std::max(res.covariance(2, 2), 0.0));
  out.temperature = temperature_from_gamma(out.gamma, cal);
  out.temperature_se = 2.0 * out.temperature * out.gamma_se / out.gamma;
  out.chi2 = res.chi2;
  out.n_points = res.n_points;
  out.iterations = res.iterations;
  return out;
}

TauKFit tau_vs_k(const std::vector<VisibilityMap>& maps, const DetectorGeometry& geom,
                 const CorrelationKernel& kernel, const DecoherenceParams& cal,
                 double band_halfwidth, int n_bins, double gamma_seed) {
  const double y_band = 0.5 * geom.y_max;
  std::vector<VisSample> band;
  for (const auto& m : maps)
    for (const auto& p : m.points) {
      if (!(p.se > 0.0) || !std::isfinite(p.v)) continue;
      if (std::abs(p.y_s - y_band) > band_halfwidth) continue;
      band.push_back({p.x_s, p.y_s, m.storage_time, p.v, p.se, m.segment_len_k});
    }
  if (band.empty()) throw std::runtime_error("tau_vs_k: no samples in the balanced band");

  double k_lo = 1e300, k_hi = -1e300;
  std::vector<double> kmod(band.size());
  for (std::size_t i = 0; i < band.size(); ++i) {
    const auto [kh, kv] = branch_moduli({band[i].x_s, band[i].y_s}, geom);
    kmod[i] = kh;
    k_lo = std::min(k_lo, kh);
    k_hi = std::max(k_hi, kh);
  }
  k_hi += 1e-9;

  TauKFit out;
  const double bin_w = (k_hi - k_lo) / n_bins;
  std::vector<int> bin_of(band.size());
  std::vector<std::set<double>> bin_times(n_bins);
  std::vector<int> bin_counts(n_bins, 0);
  for (std::size_t i = 0; i < band.size(); ++i) {
    const int b = std::min(n_bins - 1, static_cast<int>((kmod[i] - k_lo) / bin_w));
    bin_of[i] = b;
    bin_times[b].insert(band[i].t);
    ++bin_counts[b];
  }
  std::vector<int> param_of_bin(n_bins, -1);
  out.bins.resize(n_bins);
  int n_tau = 0;
  for (int b = 0; b < n_bins; ++b) {
    out.bins[b].k_center = k_lo + (b + 0.5) * bin_w;
    out.bins[b].n_points = bin_counts[b];
    if (bin_times[b].size() >= 3) {
      out.bins[b].used = true;
      param_of_bin[b] = 2 + n_tau++;
    } else {
      ++out.n_excluded_bins;
    }
  }
  if (n_tau < 2) throw std::runtime_error("tau_vs_k: fewer than 2 usable |k| bins");

  std::vector<int> sample_param;
  std::vector<SamplePath> paths;
  std::vector<double> sample_kc;
  for (std::size_t i = 0; i < band.size(); ++i) {
    const int pb = param_of_bin[bin_of[i]];
    if (pb < 0) continue;
    paths.push_back(make_path(band[i], geom, kernel, cal));
    sample_param.push_back(pb);
    sample_kc.push_back(out.bins[bin_of[i]].k_center);
  }
  const int n = static_cast<int>(paths.size());

  // Per-bin parameter is the lifetime tau_b at the bin center; the model
  // is evaluated position-resolved with the implied gamma_b = tau_b k_b.
  const auto residuals = [&](const Eigen::VectorXd& p, Eigen::VectorXd& r, Eigen::MatrixXd* jac) {
    const double v0 = p[0], w = p[1];
    if (jac) jac->setZero();
    for (int i = 0; i < n; ++i) {
      const double tau = p[sample_param[i]];
      const double gamma_b = tau * sample_kc[i];
      const ModelTerms m = eval_path(paths[i], v0, w, gamma_b, tau);
      r[i] = (m.value - paths[i].v) * paths[i].inv_se;
      if (jac) {
        (*jac)(i, 0) = m.d_v0 * paths[i].inv_se;
        (*jac)(i, 1) = m.d_w * paths[i].inv_se;
        (*jac)(i, sample_param[i]) = m.d_decay * paths[i].inv_se;
      }
    }
  };

  Eigen::VectorXd p0(2 + n_tau);
  p0[0] = 0.9;
  p0[1] = 0.1;
  for (int b = 0; b < n_bins; ++b)
    if (param_of_bin[b] >= 0) p0[param_of_bin[b]] = gamma_seed / out.bins[b].k_center;

  const LevMarResult res = levmar_fit(residuals, p0, n);
  out.v0 = res.params[0];
  out.w = res.params[1];
  out.v0_se = std::sqrt(std::max(res.covariance(0, 0), 0.0));
  out.w_se = std::sqrt(std::max(res.covariance(1, 1), 0.0));
  out.chi2 = res.chi2;

  // tau(k) = gamma/|k| across bins by weighted least squares.
  double num = 0.0, den = 0.0;
  for (int b = 0; b < n_bins; ++b) {
    if (param_of_bin[b] < 0) continue;
    auto& bin = out.bins[b];
    bin.tau = res.params[param_of_bin[b]];
    bin.tau_se = std::sqrt(std::max(res.covariance(param_of_bin[b], param_of_bin[b]), 0.0));
    if (bin.tau_se <= 0.0) continue;
    const double wgt = 1.0 / (bin.tau_se * bin.tau_se);
    num += wgt * bin.tau / bin.k_center;
    den += wgt / (bin.k_center * bin.k_center);
  }
  if (den <= 0.0) throw std::runtime_error("tau_vs_k: no usable bin lifetimes");
  out.gamma = num / den;
  out.gamma_se = std::sqrt(1.0 / den);
  out.temperature = temperature_from_gamma(out.gamma, cal);
  return out;
}

}  // namespace bellmux
