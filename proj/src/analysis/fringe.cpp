#include "bellmux/analysis/fringe.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "bellmux/analysis/filter.hpp"

namespace bellmux {

namespace {

double sinc(double x) { return std::abs(x) < 1e-12 ? 1.0 : std::sin(x) / x; }

struct SegmentFit {
  double v = 0.0;
  double var = 0.0;
  bool ok = false;
};

/// Least-squares a*cos + b*sin + c over one segment of a column;
/// returns visibility amp/c with its variance.
SegmentFit fit_segment(const double* data, int stride, int len, double freq_bins) {
  Eigen::Matrix3d ata = Eigen::Matrix3d::Zero();
  Eigen::Vector3d atb = Eigen::Vector3d::Zero();
  const double mid = 0.5 * (len - 1);
  for (int j = 0; j < len; ++j) {
    const double ph = 2.0 * std::numbers::pi * freq_bins * (j - mid);
    const Eigen::Vector3d x(std::cos(ph), std::sin(ph), 1.0);
    ata += x * x.transpose();
    atb += x * data[static_cast<std::size_t>(j) * stride];
  }
  SegmentFit out;
  Eigen::LDLT<Eigen::Matrix3d> ldlt(ata);
  if (ldlt.info() != Eigen::Success) return out;
  const Eigen::Vector3d p = ldlt.solve(atb);
  double sse = 0.0;
  for (int j = 0; j < len; ++j) {
    const double ph = 2.0 * std::numbers::pi * freq_bins * (j - mid);
    const double m = p[0] * std::cos(ph) + p[1] * std::sin(ph) + p[2];
    const double r = data[static_cast<std::size_t>(j) * stride] - m;
    sse += r * r;
  }
  if (!(p[2] > 0.0)) return out;
  const double s2 = sse / std::max(1, len - 3);
  const Eigen::Matrix3d cov = ldlt.solve(Eigen::Matrix3d::Identity()) * s2;
  // Quadrature amplitude with the noise-variance term subtracted; the
  // raw sqrt(ac^2 + as^2) is biased upward at low contrast.
  const double amp2 = p[0] * p[0] + p[1] * p[1] - cov(0, 0) - cov(1, 1);
  const double amp = std::sqrt(std::max(amp2, 0.0));
  if (amp > 0.0) {
    const Eigen::Vector3d grad(p[0] / (amp * p[2]), p[1] / (amp * p[2]), -amp / (p[2] * p[2]));
    out.v = amp / p[2];
    out.var = std::max(grad.dot(cov * grad), 1e-12);
  } else {
    out.v = 0.0;
    out.var = std::max((cov(0, 0) + cov(1, 1)) / (p[2] * p[2]), 1e-12);
  }
  out.ok = true;
  return out;
}

double column_sse(const double* data, int stride, int len, double freq_bins) {
  Eigen::Matrix3d ata = Eigen::Matrix3d::Zero();
  Eigen::Vector3d atb = Eigen::Vector3d::Zero();
  double yy = 0.0;
  const double mid = 0.5 * (len - 1);
  for (int j = 0; j < len; ++j) {
    const double ph = 2.0 * std::numbers::pi * freq_bins * (j - mid);
    const Eigen::Vector3d x(std::cos(ph), std::sin(ph), 1.0);
    const double d = data[static_cast<std::size_t>(j) * stride];
    ata += x * x.transpose();
    atb += x * d;
    yy += d * d;
  }
  const Eigen::Vector3d p = ata.ldlt().solve(atb);
  return yy - 2.0 * p.dot(atb) + p.dot(ata * p);
}

}  // namespace

FringeConfig make_fringe_config(const PhaseProfile& phase, const DetectorGeometry& geom) {
  FringeConfig cfg;
  const Wavevector a = phase.total_gradient();
  cfg.freq_y = std::abs(a.y) * geom.pixel_pitch / (2.0 * std::numbers::pi);
  const double hp = 0.5 * geom.pixel_pitch;
  cfg.pixel_blur = sinc(phase.a_w.x * hp) * sinc(phase.a_w.y * hp) * sinc(phase.a_r.x * hp) *
                   sinc(phase.a_r.y * hp);
  return cfg;
}

VisibilityMap visibility_map(const CoincidenceMap& map, const DetectorGeometry& geom,
                             const FringeConfig& cfg) {
  VisibilityMap out;
  out.storage_time = map.storage_time;
  out.sum_w = map.sum_w();
  out.sum_h = map.sum_h();
  out.segment_len_k = cfg.segment_px * geom.pixel_pitch;
  const int sw = out.sum_w;
  const int sh = out.sum_h;
  const std::size_t bins = map.sum_bins();

  // Smoothed port maps; sigma in px converts to half-pitch bins.
  std::array<std::vector<double>, 4> smooth;
  const auto kx = gaussian_kernel(2.0 * cfg.smooth_sigma_x_px);
  const auto ky = gaussian_kernel(2.0 * cfg.smooth_sigma_y_px);
  for (int p = 0; p < 4; ++p) {
    smooth[p].assign(bins, 0.0);
    for (std::size_t i = 0; i < bins; ++i) smooth[p][i] = map.ports[p][i];
    smooth_rows(smooth[p], sw, sh, kx);
    smooth_cols(smooth[p], sw, sh, ky);
  }
  std::vector<double> raw_total(bins, 0.0);
  for (std::size_t i = 0; i < bins; ++i)
    for (int p = 0; p < 4; ++p) raw_total[i] += map.ports[p][i];

  const int seg = 2 * cfg.segment_px;
  const int step = std::max(1, 2 * cfg.step_px);
  // Keep segments clear of rows whose smoothed values mix reflected
  // padding into the fringe.
  const int y_guard = ky.size() > 1 ? static_cast<int>(ky.size() / 2) : 0;
  if (seg + 2 * y_guard > sh) return out;

  // Fringe frequency in bins, optionally refined on the strongest column.
  double freq_bins = 0.5 * cfg.freq_y;
  if (cfg.refine_frequency && freq_bins > 0.0) {
    int best_col = sw / 2;
    double best_counts = -1.0;
    for (int sx = 0; sx < sw; ++sx) {
      double c = 0.0;
      for (int sy = 0; sy < sh; ++sy) c += raw_total[static_cast<std::size_t>(sy) * sw + sx];
      if (c > best_counts) {
        best_counts = c;
        best_col = sx;
      }
    }
    const double* col = smooth[0].data() + best_col;
    double lo = 0.8 * freq_bins, hi = 1.2 * freq_bins;
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = column_sse(col, sw, sh, x1), f2 = column_sse(col, sw, sh, x2);
    for (int it = 0; it < 60; ++it) {
      if (f1 < f2) {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - gr * (hi - lo);
        f1 = column_sse(col, sw, sh, x1);
      } else {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + gr * (hi - lo);
        f2 = column_sse(col, sw, sh, x2);
      }
    }
    freq_bins = 0.5 * (lo + hi);
  }

  double correction = 1.0;
  if (cfg.correct_smoothing) correction *= kernel_transfer(ky, freq_bins);
  if (cfg.deblur_pixelation) correction *= cfg.pixel_blur;
  if (correction <= 0.05) correction = 1.0;  // degenerate configuration, leave raw

  const int margin_bins = 2 * cfg.x_margin_px;
  for (int sx = margin_bins; sx < sw - margin_bins; ++sx) {
    for (int sy0 = y_guard; sy0 + seg <= sh - y_guard; sy0 += step) {
      double counts = 0.0;
      for (int j = 0; j < seg; ++j)
        counts += raw_total[static_cast<std::size_t>(sy0 + j) * sw + sx];
      if (counts < cfg.min_counts) continue;

      double wsum = 0.0, vsum = 0.0;
      for (int p = 0; p < 4; ++p) {
        const double* base = smooth[p].data() + static_cast<std::size_t>(sy0) * sw + sx;
        const SegmentFit f = fit_segment(base, sw, seg, freq_bins);
        if (!f.ok) continue;
        const double w = 1.0 / f.var;
        wsum += w;
        vsum += w * f.v;
      }
      if (wsum <= 0.0) continue;

      VisibilityPoint pt;
      pt.sx = sx;
      pt.sy = sy0 + seg / 2;
      pt.x_s = map.x_s(geom, sx);
      pt.y_s = map.y_s(geom, pt.sy);
      pt.v = (vsum / wsum) / correction;
      pt.se = std::sqrt(1.0 / wsum) / correction;
      pt.counts = counts;
      pt.freq = 2.0 * freq_bins;
      pt.flagged = pt.v < 0.0 || pt.v > 1.0;
      out.points.push_back(pt);
    }
  }
  return out;
}

}  // namespace bellmux
