#include "bellmux/sim/capture.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace bellmux {

namespace {

double norm_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

double norm_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

/// E[ clamp(m+1 - |X|/p, 0, 1) ] for X ~ N(mu, sigma^2).
double trapezoid_mean(double mu, double sigma, double pitch, int m) {
  const double a = m * pitch;
  const double b = (m + 1) * pitch;
  const auto cdf = [&](double x) { return norm_cdf((x - mu) / sigma); };
  const auto pdf = [&](double x) { return norm_pdf((x - mu) / sigma); };
  // Partial expectation of X on (lo, hi).
  const auto pe = [&](double lo, double hi) {
    return mu * (cdf(hi) - cdf(lo)) - sigma * (pdf(hi) - pdf(lo));
  };
  double r = cdf(a) - cdf(-a);
  r += (m + 1) * (cdf(b) - cdf(a)) - pe(a, b) / pitch;
  r += (m + 1) * (cdf(-a) - cdf(-b)) + pe(-b, -a) / pitch;
  return r;
}

/// 64-point Gauss-Legendre nodes/weights on [-1, 1].
struct GaussLegendre64 {
  std::array<double, 64> x{}, w{};
  GaussLegendre64() {
    const int n = 64;
    for (int i = 0; i < (n + 1) / 2; ++i) {
      double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
      double pp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = 0.0;
        for (int j = 0; j < n; ++j) {
          const double p2 = p1;
          p1 = p0;
          p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
        }
        pp = n * (z * p0 - p1) / (z * z - 1.0);
        const double z1 = z;
        z = z1 - p0 / pp;
        if (std::abs(z - z1) < 1e-15) break;
      }
      x[i] = -z;
      x[n - 1 - i] = z;
      w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
      w[n - 1 - i] = w[i];
    }
  }
};

const GaussLegendre64& gl64() {
  static const GaussLegendre64 g;
  return g;
}

}  // namespace

int window_halfwidth_px(double n_sigma, double sigma_k, double pitch) {
  if (!(n_sigma > 0.0) || !(sigma_k > 0.0) || !(pitch > 0.0))
    throw std::domain_error("window_halfwidth_px: arguments must be > 0");
  const long m = std::lround(n_sigma * sigma_k / pitch - 0.5);
  return static_cast<int>(std::max(0L, m));
}

double axis_capture_pair(double sigma_k, double pitch, int m) {
  return trapezoid_mean(0.0, sigma_k, pitch, m);
}

double axis_capture_samecell(double sigma_k, double cell_w, double pitch, int m) {
  // Outer integral over the triangular density of U1 - U2 on [-w, w];
  // the integrand is even in v, so integrate [0, w] and double.
  const auto& g = gl64();
  double total = 0.0;
  for (int i = 0; i < 64; ++i) {
    const double v = 0.5 * cell_w * (g.x[i] + 1.0);
    const double dens = (cell_w - v) / (cell_w * cell_w);
    total += 0.5 * cell_w * g.w[i] * dens * trapezoid_mean(v, sigma_k, pitch, m);
  }
  return 2.0 * total;
}

double solve_kernel_sigma_px(double pitch, double n_sigma, double hint_px) {
  const double target_per_axis = std::erf(n_sigma / std::sqrt(2.0)) / n_sigma;
  double best = -1.0;
  for (int m = 1; m <= 8; ++m) {
    double lo = m / n_sigma + 1e-9;
    double hi = (m + 1) / n_sigma - 1e-9;
    const auto f = [&](double s_px) {
      return axis_capture_pair(s_px * pitch, pitch, m) * 2.0 * s_px / (2.0 * m + 1.0) -
             target_per_axis;
    };
    if (f(lo) * f(hi) > 0.0) continue;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (f(lo) * f(mid) <= 0.0)
        hi = mid;
      else
        lo = mid;
    }
    const double root = 0.5 * (lo + hi);
    if (best < 0.0 || std::abs(root - hint_px) < std::abs(best - hint_px)) best = root;
  }
  if (best < 0.0) throw std::runtime_error("solve_kernel_sigma_px: no matching width found");
  return best;
}

}  // namespace bellmux
