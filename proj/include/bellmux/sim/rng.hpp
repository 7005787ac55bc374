#pragma once
#include <cstdint>

namespace bellmux {

/// Counter-derived random stream. A stream is keyed on
/// (seed, schedule index, shot index) so shots can be generated in any
/// order, on any number of threads, with identical output.
class RngStream {
 public:
  RngStream() = default;
  explicit RngStream(std::uint64_t state) : state_(state) {}

  static std::uint64_t mix(std::uint64_t z);

  /// Stream for one shot of one schedule entry.
  static RngStream for_shot(std::uint64_t seed, std::uint64_t entry, std::uint64_t shot);

  /// Derived stream for auxiliary draws (bootstraps, sub-tasks).
  static RngStream derive(std::uint64_t seed, std::uint64_t tag);

  std::uint64_t next_u64();
  double uniform();                    ///< in [0, 1)
  double uniform(double a, double b);  ///< in [a, b)
  double gauss();                      ///< standard normal
  bool bernoulli(double p);
  int poisson(double mean);
  int geometric_mean(double mean);     ///< thermal counts, P(n) = mean^n/(1+mean)^(n+1)

 private:
  std::uint64_t state_ = 0x853C49E6748FEA9BULL;
  bool have_cached_gauss_ = false;
  double cached_gauss_ = 0.0;
};

}  // namespace bellmux
