#include "bellmux/analysis/maps.hpp"

#include <cmath>
#include <stdexcept>

#include "bellmux/sim/capture.hpp"

namespace bellmux {

void CoincidenceMap::merge(const CoincidenceMap& other) {
  if (other.sum_bins() != sum_bins() || other.basis != basis)
    throw std::invalid_argument("CoincidenceMap::merge: incompatible maps");
  for (int p = 0; p < 4; ++p)
    for (std::size_t i = 0; i < ports[p].size(); ++i) ports[p][i] += other.ports[p][i];
  for (std::size_t i = 0; i < singles_w.size(); ++i) singles_w[i] += other.singles_w[i];
  for (std::size_t i = 0; i < singles_r.size(); ++i) singles_r[i] += other.singles_r[i];
  n_shots += other.n_shots;
}

CoincidenceAccumulator::CoincidenceAccumulator(const DetectorGeometry& geom,
                                               const CorrelationKernel& kernel, double n_sigma,
                                               const ScheduleMeta& meta)
    : geom_(geom), meta_(meta) {
  const int mx = window_halfwidth_px(n_sigma, kernel.sigma_x, geom.pixel_pitch);
  const int my = window_halfwidth_px(n_sigma, kernel.sigma_y, geom.pixel_pitch);
  result_.maps.resize(meta.size());
  for (std::size_t b = 0; b < meta.size(); ++b) {
    auto& m = result_.maps[b];
    m.width_px = geom.width_px;
    m.height_px = geom.height_px;
    m.m_x = mx;
    m.m_y = my;
    m.basis = static_cast<std::uint16_t>(b);
    m.storage_time = meta.times[b];
    m.n_shots = meta.shots[b];
    for (auto& v : m.ports) v.assign(m.sum_bins(), 0);
    m.singles_w.assign(static_cast<std::size_t>(geom.n_px()), 0);
    m.singles_r.assign(static_cast<std::size_t>(geom.n_px()), 0);
  }
}

void CoincidenceAccumulator::accept(std::span<const PhotonHit> hits) {
  for (const auto& h : hits) {
    if (have_shot_ && h.shot != current_shot_) flush_shot();
    current_shot_ = h.shot;
    have_shot_ = true;
    pending_.push_back(h);
  }
}

void CoincidenceAccumulator::flush_shot() {
  if (pending_.empty()) return;
  const std::uint16_t basis = pending_.front().basis;
  bool ok = basis < meta_.size();
  for (const auto& h : pending_)
    if (h.basis != basis || h.ix >= geom_.width_px || h.iy >= geom_.height_px) ok = false;
  if (!ok) {
    result_.skipped_records += pending_.size();
    pending_.clear();
    return;
  }
  auto& map = result_.maps[basis];
  const int sumw = map.sum_w();
  for (const auto& w : pending_) {
    if (w.arm == Arm::writeout)
      ++map.singles_w[static_cast<std::size_t>(w.iy) * geom_.width_px + w.ix];
    else
      ++map.singles_r[static_cast<std::size_t>(w.iy) * geom_.width_px + w.ix];
  }
  for (const auto& w : pending_) {
    if (w.arm != Arm::writeout) continue;
    for (const auto& r : pending_) {
      if (r.arm != Arm::readout) continue;
      const int dx = static_cast<int>(w.ix) - static_cast<int>(r.ix);
      const int dy = static_cast<int>(w.iy) - static_cast<int>(r.iy);
      if (std::abs(dx) > map.m_x || std::abs(dy) > map.m_y) continue;
      const int sx = w.ix + r.ix;
      const int sy = w.iy + r.iy;
      const int pi = CoincidenceMap::port_index(w.port, r.port);
      ++map.ports[pi][static_cast<std::size_t>(sy) * sumw + sx];
    }
  }
  pending_.clear();
}

AccumulationResult CoincidenceAccumulator::finish() {
  flush_shot();
  return std::move(result_);
}

AccumulationResult accumulate_coincidences(std::span<const PhotonHit> events,
                                           const DetectorGeometry& geom,
                                           const CorrelationKernel& kernel, double n_sigma,
                                           const ScheduleMeta& meta) {
  CoincidenceAccumulator acc(geom, kernel, n_sigma, meta);
  acc.accept(events);
  return acc.finish();
}

namespace {

/// Windowed product of singles counts around one sum bin: the expected
/// accidental weight of the bin under independent arms.
double pair_product(const CoincidenceMap& map, int sx, int sy) {
  double prod = 0.0;
  const int w = map.width_px;
  const int h = map.height_px;
  for (int dy = -map.m_y; dy <= map.m_y; ++dy) {
    if ((sy + dy) % 2 != 0) continue;
    const int iyw = (sy + dy) / 2;
    const int iyr = (sy - dy) / 2;
    if (iyw < 0 || iyw >= h || iyr < 0 || iyr >= h) continue;
    for (int dx = -map.m_x; dx <= map.m_x; ++dx) {
      if ((sx + dx) % 2 != 0) continue;
      const int ixw = (sx + dx) / 2;
      const int ixr = (sx - dx) / 2;
      if (ixw < 0 || ixw >= w || ixr < 0 || ixr >= w) continue;
      prod += static_cast<double>(map.singles_w[static_cast<std::size_t>(iyw) * w + ixw]) *
              map.singles_r[static_cast<std::size_t>(iyr) * w + ixr];
    }
  }
  return prod;
}

}  // namespace

G2Estimate estimate_g2(const CoincidenceMap& map, int sx0, int sx1, int sy0, int sy1) {
  G2Estimate out;
  double prod = 0.0;
  std::uint64_t coinc = 0;
  for (int sy = sy0; sy < sy1; ++sy)
    for (int sx = sx0; sx < sx1; ++sx) {
      coinc += map.port_total(sx, sy);
      prod += pair_product(map, sx, sy);
    }
  out.coincidences = coinc;
  if (prod <= 0.0 || coinc == 0) return out;
  out.g2 = static_cast<double>(map.n_shots) * static_cast<double>(coinc) / prod;
  // Poisson propagation through numerator and singles product.
  double nw = 0.0, nr = 0.0;
  for (const auto c : map.singles_w) nw += c;
  for (const auto c : map.singles_r) nr += c;
  const double rel = 1.0 / static_cast<double>(coinc) + (nw > 0 ? 1.0 / nw : 0.0) +
                     (nr > 0 ? 1.0 / nr : 0.0);
  out.se = out.g2 * std::sqrt(rel);
  out.valid = true;
  return out;
}

G2Estimate estimate_g2(const CoincidenceMap& map) {
  return estimate_g2(map, 0, map.sum_w(), 0, map.sum_h());
}

G2VisibilityAverage g2_visibility_average(const CoincidenceMap& map, int tile_px,
                                          std::uint64_t min_coincidences, int x_margin_px,
                                          int y_margin_px) {
  G2VisibilityAverage out;
  const int tile = 2 * tile_px;  // sum bins per tile
  double num = 0.0, den = 0.0;
  const int x0 = 2 * x_margin_px, x1 = map.sum_w() - 2 * x_margin_px;
  const int y0 = 2 * y_margin_px, y1 = map.sum_h() - 2 * y_margin_px;
  for (int sy = y0; sy + tile <= y1; sy += tile)
    for (int sx = x0; sx + tile <= x1; sx += tile) {
      const auto g = estimate_g2(map, sx, sx + tile, sy, sy + tile);
      if (!g.valid || g.coincidences < min_coincidences || g.g2 < 1.0) continue;
      const double v = (g.g2 - 1.0) / (g.g2 + 1.0);
      // d v / d g2 = 2 / (g2+1)^2
      const double sv = 2.0 * g.se / ((g.g2 + 1.0) * (g.g2 + 1.0));
      if (sv <= 0.0) continue;
      const double wgt = 1.0 / (sv * sv);
      num += wgt * v;
      den += wgt;
      ++out.tiles;
    }
  if (den <= 0.0) return out;
  out.mean = num / den;
  out.se = std::sqrt(1.0 / den);
  out.valid = true;
  return out;
}

ExpectedValueMap expected_value_map(const CoincidenceMap& map) {
  ExpectedValueMap out;
  out.sum_w = map.sum_w();
  out.sum_h = map.sum_h();
  const std::size_t n = map.sum_bins();
  out.e.assign(n, 0.0);
  out.se.assign(n, 0.0);
  out.n.assign(n, 0);
  out.ok.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const double pp = map.ports[0][i];
    const double pm = map.ports[1][i];
    const double mp = map.ports[2][i];
    const double mm = map.ports[3][i];
    const double tot = pp + pm + mp + mm;
    out.n[i] = static_cast<std::uint32_t>(tot);
    if (tot <= 0.0) continue;
    const double e = (pp - pm - mp + mm) / tot;
    out.e[i] = e;
    out.se[i] = std::sqrt(std::max(1.0 - e * e, 1e-12) / tot);
    out.ok[i] = 1;
  }
  return out;
}

bool visibility_two_setting(double p_plus, double p_minus, double& v_out) {
  const double den = p_plus + p_minus;
  if (den <= 0.0) return false;
  v_out = (p_plus - p_minus) / den;
  return true;
}

}  // namespace bellmux
