#include "bellmux/sim/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace bellmux {

std::uint64_t RngStream::mix(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

RngStream RngStream::for_shot(std::uint64_t seed, std::uint64_t entry, std::uint64_t shot) {
  return RngStream(mix(mix(mix(seed) + 0x2545F4914F6CDD1DULL * entry) + shot));
}

RngStream RngStream::derive(std::uint64_t seed, std::uint64_t tag) {
  return RngStream(mix(mix(seed ^ 0xD1B54A32D192ED03ULL) + tag));
}

std::uint64_t RngStream::next_u64() {
  state_ += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double RngStream::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform(double a, double b) { return a + (b - a) * uniform(); }

double RngStream::gauss() {
  if (have_cached_gauss_) {
    have_cached_gauss_ = false;
    return cached_gauss_;
  }
  // Polar Box-Muller.
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double m = std::sqrt(-2.0 * std::log(s) / s);
  cached_gauss_ = v * m;
  have_cached_gauss_ = true;
  return u * m;
}

bool RngStream::bernoulli(double p) {
  if (p <= 0.0) return false;
  if (p >= 1.0) return true;
  return uniform() < p;
}

int RngStream::poisson(double mean) {
  if (mean < 0.0) throw std::domain_error("poisson: mean must be >= 0");
  if (mean == 0.0) return 0;
  // Knuth's method; splits large means to keep the product well scaled.
  if (mean > 16.0) {
    const int half = poisson(0.5 * mean);
    return half + poisson(mean - 0.5 * mean);
  }
  const double limit = std::exp(-mean);
  int n = -1;
  double prod = 1.0;
  do {
    prod *= uniform();
    ++n;
  } while (prod > limit);
  return n;
}

int RngStream::geometric_mean(double mean) {
  if (mean < 0.0) throw std::domain_error("geometric_mean: mean must be >= 0");
  if (mean == 0.0) return 0;
  const double u = uniform();
  // Counts n >= 0 with success probability 1/(1+mean).
  const double log_ratio = std::log(mean / (1.0 + mean));
  const double x = std::log1p(-u) / log_ratio;
  return static_cast<int>(x);
}

}  // namespace bellmux
