#include "bellmux/analysis/filter.hpp"

#include <cmath>
#include <numbers>

namespace bellmux {

std::vector<double> gaussian_kernel(double sigma_bins) {
  if (sigma_bins <= 0.0) return {1.0};
  const int half = std::max(1, static_cast<int>(std::ceil(4.0 * sigma_bins)));
  std::vector<double> k(2 * half + 1);
  double sum = 0.0;
  for (int j = -half; j <= half; ++j) {
    const double z = j / sigma_bins;
    k[j + half] = std::exp(-0.5 * z * z);
    sum += k[j + half];
  }
  for (auto& v : k) v /= sum;
  return k;
}

double kernel_transfer(const std::vector<double>& kernel, double freq) {
  const int half = static_cast<int>(kernel.size() / 2);
  double h = 0.0;
  for (int j = -half; j <= half; ++j)
    h += kernel[j + half] * std::cos(2.0 * std::numbers::pi * freq * j);
  return h;
}

namespace {

int reflect(int i, int n) {
  // Reflect about the array edges (abcb|abcba|bcba style).
  if (n == 1) return 0;
  const int period = 2 * n - 2;
  i = std::abs(i) % period;
  return i < n ? i : period - i;
}

}  // namespace

void smooth_rows(std::vector<double>& img, int width, int height, const std::vector<double>& k) {
  if (k.size() <= 1) return;
  const int half = static_cast<int>(k.size() / 2);
  std::vector<double> row(width);
  for (int y = 0; y < height; ++y) {
    double* base = img.data() + static_cast<std::size_t>(y) * width;
    for (int x = 0; x < width; ++x) {
      double acc = 0.0;
      for (int j = -half; j <= half; ++j) acc += k[j + half] * base[reflect(x + j, width)];
      row[x] = acc;
    }
    for (int x = 0; x < width; ++x) base[x] = row[x];
  }
}

void smooth_cols(std::vector<double>& img, int width, int height, const std::vector<double>& k) {
  if (k.size() <= 1) return;
  const int half = static_cast<int>(k.size() / 2);
  std::vector<double> col(height);
  for (int x = 0; x < width; ++x) {
    for (int y = 0; y < height; ++y) {
      double acc = 0.0;
      for (int j = -half; j <= half; ++j)
        acc += k[j + half] * img[static_cast<std::size_t>(reflect(y + j, height)) * width + x];
      col[y] = acc;
    }
    for (int y = 0; y < height; ++y) img[static_cast<std::size_t>(y) * width + x] = col[y];
  }
}

}  // namespace bellmux
