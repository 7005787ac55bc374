#include "bellmux/analysis/summary.hpp"

#include <cmath>

#include "bellmux/sim/rng.hpp"

namespace bellmux {

namespace {

constexpr double kThreshold = 0.70710678118654752;

struct Stats {
  double fraction = 0.0, mean_violating = 0.0, mean_all = 0.0;
};

template <typename Pick>
Stats compute(const std::vector<VisibilityPoint>& pts, int n, Pick pick) {
  Stats s;
  int violating = 0;
  double sum_v = 0.0, sum_all = 0.0;
  for (int i = 0; i < n; ++i) {
    const double v = pts[pick(i)].v;
    sum_all += v;
    if (v > kThreshold) {
      ++violating;
      sum_v += v;
    }
  }
  s.fraction = static_cast<double>(violating) / n;
  s.mean_violating = violating > 0 ? sum_v / violating : 0.0;
  s.mean_all = sum_all / n;
  return s;
}

}  // namespace

ModeSummary mode_summary(const VisibilityMap& map, std::uint64_t seed, int n_bootstrap) {
  ModeSummary out;
  const auto& pts = map.points;
  const int n = static_cast<int>(pts.size());
  if (n == 0) return out;

  const Stats base = compute(pts, n, [](int i) { return i; });
  out.fraction_violating = base.fraction;
  out.mean_violating = base.mean_violating;
  out.mean_all = base.mean_all;
  out.n_points = n;
  out.valid = true;

  RngStream rng = RngStream::derive(seed, 0x5B00u);
  double sf = 0.0, sf2 = 0.0, sv = 0.0, sv2 = 0.0, sa = 0.0, sa2 = 0.0;
  for (int b = 0; b < n_bootstrap; ++b) {
    const Stats s = compute(pts, n, [&](int) { return static_cast<int>(rng.uniform() * n); });
    sf += s.fraction;
    sf2 += s.fraction * s.fraction;
    sv += s.mean_violating;
    sv2 += s.mean_violating * s.mean_violating;
    sa += s.mean_all;
    sa2 += s.mean_all * s.mean_all;
  }
  const auto sd = [&](double sum, double sum2) {
    const double m = sum / n_bootstrap;
    return std::sqrt(std::max(0.0, sum2 / n_bootstrap - m * m));
  };
  out.fraction_se = sd(sf, sf2);
  out.mean_violating_se = sd(sv, sv2);
  out.mean_all_se = sd(sa, sa2);
  return out;
}

}  // namespace bellmux
