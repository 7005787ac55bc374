#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bellmux/analytic/decoherence.hpp"
#include "bellmux/analytic/modes.hpp"
#include "bellmux/analytic/visibility.hpp"
#include "bellmux/sim/rng.hpp"

using namespace bellmux;

namespace {
DetectorGeometry toy_geom() {
  DetectorGeometry g;
  g.pixel_pitch = 2.38;
  g.width_px = 40;
  g.height_px = 60;
  g.y_max = 300.0;
  g.origin_x = -47.6;
  g.origin_y = 0.0;
  return g;
}
}  // namespace

TEST_CASE("binning_factor reference values") {
  CHECK(binning_factor(1.0, 0.565) == doctest::Approx(0.825).epsilon(1.3e-3));
  CHECK(binning_factor(2.0, 0.565) == doctest::Approx(0.4031).epsilon(1e-3));
  // Supremum 2/(alpha pi) approached from below as n -> 0+.
  const double sup = 2.0 / (0.565 * 3.14159265358979);
  CHECK(sup == doctest::Approx(1.127).epsilon(1e-3));
  CHECK(binning_factor(1e-4, 0.565) == doctest::Approx(sup).epsilon(1e-6));
  CHECK(binning_factor(1e-4, 0.565) < sup);
}

TEST_CASE("g2 and visibility convert both ways") {
  CHECK(visibility_from_g2(1.0) == 0.0);
  CHECK(visibility_from_g2(3.0) == doctest::Approx(0.5));
  CHECK(g2_from_visibility(1.0 / std::sqrt(2.0)) == doctest::Approx(5.828).epsilon(1e-3));
  CHECK_THROWS_AS(visibility_from_g2(0.5), std::domain_error);
  CHECK_THROWS_AS(g2_from_visibility(1.0), std::domain_error);
  RngStream rng(3);
  for (int i = 0; i < 1000; ++i) {
    const double v = rng.uniform() * 0.999;
    CHECK(visibility_from_g2(g2_from_visibility(v)) == doctest::Approx(v).epsilon(1e-12));
  }
}

TEST_CASE("visibility_model reference point, limits, monotonicity") {
  SourceParams src;
  src.chi = 0.01;
  NoiseModel none;
  CHECK(visibility_model(src, none, 1.0) == doctest::Approx(0.9763).epsilon(1e-4));

  src.chi = 1e-6;
  CHECK(visibility_model(src, none, 1.0) > 0.999995);

  const double f = binning_factor(1.0, 0.565);
  double prev = 1.0;
  for (double chi = 0.001; chi < 0.2; chi += 0.004) {
    const double v = visibility_model_rates(chi, 0.0, 0.0, 0.405, f);
    CHECK(v < prev);
    prev = v;
  }
  // Monotone decreasing in each noise rate.
  CHECK(visibility_model_rates(0.01, 0.001, 0.0, 0.405, f) <
        visibility_model_rates(0.01, 0.0, 0.0, 0.405, f));
  CHECK(visibility_model_rates(0.01, 0.0, 0.001, 0.405, f) <
        visibility_model_rates(0.01, 0.0, 0.0, 0.405, f));
}

TEST_CASE("readout_noise boundaries and chi term") {
  NoiseModel n;
  n.b_r0 = 0.004;
  n.b_r_inf = 0.020;
  n.b_r_chi = 0.131;
  n.tau_b = 13.0;
  CHECK(readout_noise(0.0, 0.01, n) == doctest::Approx(0.004 + 0.00131));
  CHECK(readout_noise(1e6, 0.01, n) == doctest::Approx(0.020 + 0.00131));
  CHECK(readout_noise_plateau(0.01, n) == doctest::Approx(0.02131));
  // chi coefficient alone
  NoiseModel only_chi;
  only_chi.b_r_chi = 0.131;
  CHECK(readout_noise(5.0, 0.01, only_chi) == doctest::Approx(0.00131));
  // monotone nondecreasing in t
  double prev = -1.0;
  for (double t = 0.0; t < 80.0; t += 2.0) {
    const double b = readout_noise(t, 0.01, n);
    CHECK(b >= prev);
    prev = b;
  }
}

TEST_CASE("decoherence time constant and survival") {
  DecoherenceParams dec;
  dec.gamma = 6.26e3;
  CHECK(decoherence(0.0, 139.1, dec).eta_ratio == 1.0);
  CHECK(decoherence(10.0, 139.1, dec).tau == doctest::Approx(45.0).epsilon(1e-3));
  const double tau = decoherence(0.0, 139.1, dec).tau;
  CHECK(decoherence(tau, 139.1, dec).eta_ratio == doctest::Approx(std::exp(-1.0)));
  const auto zero = decoherence(10.0, 0.0, dec);
  CHECK(std::isinf(zero.tau));
  CHECK(zero.eta_ratio == 1.0);
}

TEST_CASE("imbalance_visibility balanced line, hand value, identity") {
  DetectorGeometry g = toy_geom();
  DecoherenceParams dec;
  dec.gamma = 6.26e3;
  for (double t : {0.0, 10.0, 40.0, 80.0})
    CHECK(imbalance_visibility(t, {25.0, 150.0}, g, dec) == doctest::Approx(1.0));
  CHECK(imbalance_visibility(40.0, {0.0, 100.0}, g, dec) == doctest::Approx(0.838).epsilon(1e-3));

  // Equals 2 c_H c_V / (c_H^2 + c_V^2) with c_P^2 = exp(-t^2 |k_P|^2 / gamma^2).
  RngStream rng(9);
  for (int i = 0; i < 300; ++i) {
    const Wavevector k{rng.uniform(-40, 40), rng.uniform(0.0, 150.0)};
    const double t = rng.uniform(0.0, 60.0);
    const auto [kh, kv] = branch_moduli(k, g);
    const double ch2 = std::exp(-t * t * kh * kh / (dec.gamma * dec.gamma));
    const double cv2 = std::exp(-t * t * kv * kv / (dec.gamma * dec.gamma));
    const double direct = 2.0 * std::sqrt(ch2 * cv2) / (ch2 + cv2);
    CHECK(imbalance_visibility(t, k, g, dec) == doctest::Approx(direct).epsilon(1e-12));
  }
}

TEST_CASE("visibility_storage reference values") {
  CHECK(visibility_storage(0.0, 45.0, 0.92, 0.13) == doctest::Approx(0.806).epsilon(1e-3));
  CHECK(visibility_storage(45.0, 45.0, 0.92, 0.13) == doctest::Approx(0.665).epsilon(1e-3));
}

TEST_CASE("visibility_vs_time is nonincreasing in t and crossings move with |k|") {
  DetectorGeometry g = toy_geom();
  SourceParams src;
  src.chi = 0.01;
  NoiseModel noise;
  noise.b_r0 = 0.004;
  noise.b_r_inf = 0.020;
  noise.b_r_chi = 0.131;
  DecoherenceParams dec;
  dec.gamma = 6.26e3;

  for (const Wavevector k : {Wavevector{0.0, 120.0}, Wavevector{30.0, 60.0}}) {
    double prev = 2.0;
    for (double t = 0.0; t < 90.0; t += 1.0) {
      const double v = visibility_vs_time(t, k, src, noise, dec, 1.0, g);
      CHECK(v <= prev + 1e-12);
      prev = v;
    }
  }

  // Threshold crossing time decreases with |k| along the balanced line.
  const double thr = 1.0 / std::sqrt(2.0);
  double prev_cross = 1e9;
  for (double x = 5.0; x < 45.0; x += 10.0) {
    const Wavevector k{x, 150.0};
    double cross = 0.0;
    for (double t = 0.0; t < 300.0; t += 0.05) {
      if (visibility_vs_time(t, k, src, noise, dec, 1.0, g) < thr) {
        cross = t;
        break;
      }
    }
    CHECK(cross > 0.0);
    CHECK(cross < prev_cross);
    prev_cross = cross;
  }

  // W-form equivalence: with plateau noise the product form matches the
  // factorized storage-time law at the mean branch modulus.
  const Wavevector k{10.0, 80.0};
  const double f = binning_factor(1.0, src.alpha);
  const double b = readout_noise_plateau(src.chi, noise);
  const double v0 = v0_factor(src.chi, f);
  const double w = w_factor(b, src.eta_r0, src.chi, f);
  const auto [kh, kv] = branch_moduli(k, g);
  const double tau = dec.gamma / (0.5 * (kh + kv));
  for (double t : {0.0, 10.0, 25.0, 40.0}) {
    const double direct = visibility_vs_time(t, k, src, noise, dec, 1.0, g,
                                             SurvivalModel::mean_k, NoiseTimeModel::plateau);
    const double factored = visibility_storage(t, tau, v0, w) * imbalance_visibility(t, k, g, dec);
    CHECK(direct == doctest::Approx(factored).epsilon(1e-12));
  }
}

TEST_CASE("temperature calibration pairing and roundtrip") {
  DecoherenceParams dec;
  CHECK(temperature_from_gamma(6.26e3, dec) == doctest::Approx(47.0).epsilon(1e-4));
  CHECK(temperature_from_gamma(5.98e3, dec) == doctest::Approx(51.5).epsilon(1e-2));
  RngStream rng(21);
  for (int i = 0; i < 200; ++i) {
    const double t = rng.uniform(5.0, 400.0);
    CHECK(temperature_from_gamma(gamma_from_temperature(t, dec), dec) ==
          doctest::Approx(t).epsilon(1e-10));
  }
}

TEST_CASE("mode_count inversion, linearity and reference scale") {
  CorrelationKernel k{5.0, 7.0};
  const double unit_area = 4.0 * k.sigma_x * k.sigma_y / 0.565;
  CHECK(mode_count(unit_area, k, 0.565) == doctest::Approx(1.0));
  CHECK(mode_count(2.0 * unit_area, k, 0.565) == doctest::Approx(2.0));

  // Reference field of view vs the expected number of mode pairs.
  DetectorGeometry ref;
  CorrelationKernel ref_kernel{6.2594, 6.2594};
  const double m = mode_count(ref.area(), ref_kernel, 0.565);
  CHECK(m > 550.0 / 1.5);
  CHECK(m < 550.0 * 1.5);
}

TEST_CASE("collision_probability exact values and sampling oracle") {
  CHECK(collision_probability(20800, 0) == 0.0);
  CHECK(collision_probability(20800, 1) == 0.0);
  CHECK(collision_probability(20800, 5) == doctest::Approx(4.81e-4).epsilon(2e-3));
  CHECK(collision_probability(10, 11) == 1.0);

  // Monte-Carlo placement oracle.
  const int n_px = 512, k = 6;
  const double exact = collision_probability(n_px, k);
  RngStream rng(2024);
  const int trials = 2000000;
  int collided = 0;
  std::vector<int> px(k);
  for (int t = 0; t < trials; ++t) {
    bool hit = false;
    for (int i = 0; i < k && !hit; ++i) {
      px[i] = static_cast<int>(rng.uniform() * n_px);
      for (int j = 0; j < i; ++j)
        if (px[j] == px[i]) hit = true;
    }
    collided += hit ? 1 : 0;
  }
  const double est = static_cast<double>(collided) / trials;
  const double se = std::sqrt(exact * (1.0 - exact) / trials);
  CHECK(std::abs(est - exact) < 3.0 * se + 1e-12);
}

TEST_CASE("crosstalk_probability limits and reference value") {
  SourceParams src;
  src.chi = 0.01;
  src.eta_r0 = 0.405;
  src.eta_w = 0.08;
  CHECK(crosstalk_probability(src, 2.65, 20800, 1) == 0.0);
  SourceParams zero = src;
  zero.chi = 1e-300;
  CHECK(crosstalk_probability(zero, 2.65, 20800, 550) == doctest::Approx(0.0));
  CHECK(crosstalk_probability(src, 2.65, 20800, 550) == doctest::Approx(1.7e-3).epsilon(0.02));
}

TEST_CASE("success_probability examples") {
  CHECK(success_probability(0.5, 0.01, 0) == 0.0);
  CHECK(success_probability(1.0, 1.0, 3) == 1.0);
  CHECK(success_probability(0.08, 0.01, 550) == doctest::Approx(0.356).epsilon(2e-3));
}
