#include "bellmux/analysis/bell.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

namespace bellmux {

namespace {

double sinc(double x) { return std::abs(x) < 1e-12 ? 1.0 : std::sin(x) / x; }

struct TraceFit {
  double amplitude = 0.0;
  double se = 0.0;
  double freq = 0.0;
  bool ok = false;
};

/// Weighted sinusoid amplitude of a 1-d trace at a fixed frequency
/// [cycles per bin].
TraceFit fit_trace(const std::vector<double>& y, const std::vector<double>& w, double freq) {
  Eigen::Matrix3d ata = Eigen::Matrix3d::Zero();
  Eigen::Vector3d atb = Eigen::Vector3d::Zero();
  const int n = static_cast<int>(y.size());
  int used = 0;
  for (int j = 0; j < n; ++j) {
    if (w[j] <= 0.0) continue;
    const double ph = 2.0 * std::numbers::pi * freq * j;
    const Eigen::Vector3d x(std::cos(ph), std::sin(ph), 1.0);
    ata += w[j] * x * x.transpose();
    atb += w[j] * x * y[j];
    ++used;
  }
  TraceFit out;
  if (used < 8) return out;
  Eigen::LDLT<Eigen::Matrix3d> ldlt(ata);
  if (ldlt.info() != Eigen::Success) return out;
  const Eigen::Vector3d p = ldlt.solve(atb);
  double chi2 = 0.0;
  for (int j = 0; j < n; ++j) {
    if (w[j] <= 0.0) continue;
    const double ph = 2.0 * std::numbers::pi * freq * j;
    const double m = p[0] * std::cos(ph) + p[1] * std::sin(ph) + p[2];
    chi2 += w[j] * (y[j] - m) * (y[j] - m);
  }
  const double s2 = std::max(1.0, chi2 / std::max(1, used - 3));
  const Eigen::Matrix3d cov = ldlt.solve(Eigen::Matrix3d::Identity()) * s2;
  const double amp = std::hypot(p[0], p[1]);
  out.amplitude = amp;
  out.freq = freq;
  out.ok = amp > 0.0;
  if (out.ok) {
    const Eigen::Vector3d grad(p[0] / amp, p[1] / amp, 0.0);
    out.se = std::sqrt(std::max(grad.dot(cov * grad), 0.0));
  }
  return out;
}

double trace_sse(const std::vector<double>& y, const std::vector<double>& w, double freq) {
  Eigen::Matrix3d ata = Eigen::Matrix3d::Zero();
  Eigen::Vector3d atb = Eigen::Vector3d::Zero();
  double yy = 0.0;
  const int n = static_cast<int>(y.size());
  for (int j = 0; j < n; ++j) {
    if (w[j] <= 0.0) continue;
    const double ph = 2.0 * std::numbers::pi * freq * j;
    const Eigen::Vector3d x(std::cos(ph), std::sin(ph), 1.0);
    ata += w[j] * x * x.transpose();
    atb += w[j] * x * y[j];
    yy += w[j] * y[j] * y[j];
  }
  const Eigen::Vector3d p = ata.ldlt().solve(atb);
  return yy - 2.0 * p.dot(atb) + p.dot(ata * p);
}

/// Global weighted sinusoid fit of an expected-value map; returns the
/// fitted surface.
std::vector<double> fit_e_surface(const ExpectedValueMap& e, double fx_bins, double fy_bins) {
  Eigen::Matrix3d ata = Eigen::Matrix3d::Zero();
  Eigen::Vector3d atb = Eigen::Vector3d::Zero();
  for (int sy = 0; sy < e.sum_h; ++sy)
    for (int sx = 0; sx < e.sum_w; ++sx) {
      const std::size_t i = static_cast<std::size_t>(sy) * e.sum_w + sx;
      if (!e.ok[i]) continue;
      const double w = 1.0 / std::max(e.se[i] * e.se[i], 1e-12);
      const double ph = 2.0 * std::numbers::pi * (fx_bins * sx + fy_bins * sy);
      const Eigen::Vector3d x(std::cos(ph), std::sin(ph), 1.0);
      ata += w * x * x.transpose();
      atb += w * x * e.e[i];
    }
  const Eigen::Vector3d p = ata.ldlt().solve(atb);
  std::vector<double> surface(static_cast<std::size_t>(e.sum_w) * e.sum_h, 0.0);
  for (int sy = 0; sy < e.sum_h; ++sy)
    for (int sx = 0; sx < e.sum_w; ++sx) {
      const double ph = 2.0 * std::numbers::pi * (fx_bins * sx + fy_bins * sy);
      surface[static_cast<std::size_t>(sy) * e.sum_w + sx] =
          p[0] * std::cos(ph) + p[1] * std::sin(ph) + p[2];
    }
  return surface;
}

}  // namespace

BellConfig make_bell_config(const PhaseProfile& phase, const DetectorGeometry& geom) {
  BellConfig cfg;
  const Wavevector a = phase.total_gradient();
  cfg.freq_x = std::abs(a.x) * geom.pixel_pitch / (2.0 * std::numbers::pi);
  cfg.freq_y = std::abs(a.y) * geom.pixel_pitch / (2.0 * std::numbers::pi);
  const double hp = 0.5 * geom.pixel_pitch;
  cfg.pixel_blur = sinc(phase.a_w.x * hp) * sinc(phase.a_w.y * hp) * sinc(phase.a_r.x * hp) *
                   sinc(phase.a_r.y * hp);
  return cfg;
}

BellMapResult bell_map(const std::array<const CoincidenceMap*, 4>& maps,
                       const DetectorGeometry& geom, const BellConfig& cfg) {
  (void)geom;
  std::array<ExpectedValueMap, 4> e;
  for (int b = 0; b < 4; ++b) e[b] = expected_value_map(*maps[b]);

  BellMapResult out;
  out.sum_w = e[0].sum_w;
  out.sum_h = e[0].sum_h;
  const std::size_t bins = static_cast<std::size_t>(out.sum_w) * out.sum_h;
  out.s_raw.assign(bins, 0.0);
  out.ok.assign(bins, 0);

  const double blur = cfg.deblur_pixelation ? cfg.pixel_blur : 1.0;
  static constexpr double kSigns[4] = {1.0, 1.0, 1.0, -1.0};

  std::vector<double> var(bins, 0.0);
  for (std::size_t i = 0; i < bins; ++i) {
    bool ok = true;
    double s = 0.0, v = 0.0;
    for (int b = 0; b < 4; ++b) {
      if (!e[b].ok[i] || e[b].n[i] < cfg.min_counts) {
        ok = false;
        break;
      }
      s += kSigns[b] * e[b].e[i];
      v += e[b].se[i] * e[b].se[i];
    }
    if (!ok) continue;
    out.s_raw[i] = s / blur;
    var[i] = v / (blur * blur);
    out.ok[i] = 1;
  }

  // x-averaged trace with inverse-variance weights.
  out.s_avg.assign(out.sum_h, 0.0);
  out.s_avg_se.assign(out.sum_h, 0.0);
  out.s_avg_ok.assign(out.sum_h, 0);
  std::vector<double> trace_w(out.sum_h, 0.0);
  for (int sy = 0; sy < out.sum_h; ++sy) {
    double wsum = 0.0, acc = 0.0;
    for (int sx = 0; sx < out.sum_w; ++sx) {
      const std::size_t i = static_cast<std::size_t>(sy) * out.sum_w + sx;
      if (!out.ok[i] || var[i] <= 0.0) continue;
      const double w = 1.0 / var[i];
      wsum += w;
      acc += w * out.s_raw[i];
    }
    if (wsum <= 0.0) continue;
    out.s_avg[sy] = acc / wsum;
    out.s_avg_se[sy] = std::sqrt(1.0 / wsum);
    out.s_avg_ok[sy] = 1;
    trace_w[sy] = wsum;
  }

  double freq_bins = 0.5 * cfg.freq_y;
  if (cfg.refine_frequency && freq_bins > 0.0) {
    double lo = 0.8 * freq_bins, hi = 1.2 * freq_bins;
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = trace_sse(out.s_avg, trace_w, x1), f2 = trace_sse(out.s_avg, trace_w, x2);
    for (int it = 0; it < 60; ++it) {
      if (f1 < f2) {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - gr * (hi - lo);
        f1 = trace_sse(out.s_avg, trace_w, x1);
      } else {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + gr * (hi - lo);
        f2 = trace_sse(out.s_avg, trace_w, x2);
      }
    }
    freq_bins = 0.5 * (lo + hi);
  }
  const TraceFit tf = fit_trace(out.s_avg, trace_w, freq_bins);
  out.amplitude = tf.amplitude;
  out.amplitude_se = tf.se;
  out.fitted_freq_y = 2.0 * freq_bins;

  // Smooth surface from per-map global sinusoid fits.
  out.s_fit.assign(bins, 0.0);
  const double fx_bins = 0.5 * cfg.freq_x;
  for (int b = 0; b < 4; ++b) {
    const auto surface = fit_e_surface(e[b], fx_bins, freq_bins);
    for (std::size_t i = 0; i < bins; ++i) out.s_fit[i] += kSigns[b] * surface[i] / blur;
  }
  return out;
}

}  // namespace bellmux
