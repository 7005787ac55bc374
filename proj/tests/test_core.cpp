#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bellmux/core/geometry.hpp"
#include "bellmux/core/kernel.hpp"
#include "bellmux/core/phase.hpp"
#include "bellmux/sim/rng.hpp"

using namespace bellmux;

namespace {
DetectorGeometry toy_geom(double y_max = 300.0) {
  DetectorGeometry g;
  g.pixel_pitch = 2.38;
  g.width_px = 40;
  g.height_px = 60;
  g.y_max = y_max;
  g.origin_x = -47.6;
  g.origin_y = 0.0;
  return g;
}
}  // namespace

TEST_CASE("fold_coordinates maps the lower half identically") {
  const auto g = toy_geom();
  const auto f = fold_coordinates({0.0, 0.0}, g);
  CHECK(f.branch == Branch::H);
  CHECK(f.k.x == 0.0);
  CHECK(f.k.y == 0.0);
}

TEST_CASE("fold_coordinates reflects the upper half") {
  const auto g = toy_geom();
  const auto f = fold_coordinates({5.0, 250.0}, g);
  CHECK(f.branch == Branch::V);
  CHECK(f.k.x == doctest::Approx(5.0));
  CHECK(f.k.y == doctest::Approx(50.0));
}

TEST_CASE("fold_coordinates rejects out-of-range y") {
  const auto g = toy_geom();
  CHECK_THROWS_AS(fold_coordinates({0.0, -1.0}, g), std::domain_error);
  CHECK_THROWS_AS(fold_coordinates({0.0, 301.0}, g), std::domain_error);
}

TEST_CASE("fold and unfold are inverse on both branches") {
  const auto g = toy_geom();
  RngStream rng(42);
  for (int i = 0; i < 1000; ++i) {
    const Wavevector raw{rng.uniform(-100.0, 100.0), rng.uniform(0.0, 300.0)};
    const auto f = fold_coordinates(raw, g);
    CHECK(f.k.y >= 0.0);
    CHECK(f.k.y <= 150.0);
    const Wavevector back = unfold_coordinates(f.k, f.branch, g);
    CHECK(back.x == doctest::Approx(raw.x).epsilon(1e-12));
    CHECK(back.y == doctest::Approx(raw.y).epsilon(1e-12));
    // Folding the V pre-image of the observed point returns the same point.
    const auto again = fold_coordinates(unfold_coordinates(f.k, Branch::V, g), g);
    CHECK(again.k.x == doctest::Approx(f.k.x));
    CHECK(again.k.y == doctest::Approx(f.k.y).epsilon(1e-12));
  }
}

TEST_CASE("branch_moduli symmetry point and arithmetic") {
  const auto g = toy_geom();
  {
    const auto [kh, kv] = branch_moduli({0.0, 150.0}, g);
    CHECK(kh == doctest::Approx(150.0));
    CHECK(kv == doctest::Approx(150.0));
  }
  {
    const auto [kh, kv] = branch_moduli({0.0, 100.0}, g);
    CHECK(kh == doctest::Approx(100.0));
    CHECK(kv == doctest::Approx(200.0));
  }
  {
    const auto [kh, kv] = branch_moduli({30.0, 40.0}, g);
    CHECK(kh == doctest::Approx(50.0));
    CHECK(kv == doctest::Approx(std::sqrt(30.0 * 30.0 + 260.0 * 260.0)));
    CHECK(kv == doctest::Approx(261.7).epsilon(1e-3));
    CHECK(kv >= kh);
  }
}

TEST_CASE("geometry validation rejects a region outside the fold") {
  auto g = toy_geom();
  g.height_px = 80;  // 80 * 2.38 = 190.4 > y_max/2
  CHECK_THROWS(g.validate());
  g.height_px = 63;  // 149.94 < 150
  CHECK_NOTHROW(g.validate());
}

TEST_CASE("phase_at linear and constant variants") {
  PhaseProfile p;
  p.variant = PhaseVariant::linear;
  p.a_w = {0.0, 0.0};
  p.a_r = {0.0, 0.0};
  p.phi0 = 0.0;
  CHECK(phase_at(p, {11.0, -3.0}, {9.0, 2.0}) == 0.0);

  p.a_r = {0.0, 0.5};
  p.phi0 = 0.1;
  CHECK(phase_at(p, {4.0, 7.0}, {0.0, 2.0}) == doctest::Approx(1.1));

  p.variant = PhaseVariant::constant;
  p.phi0 = 0.7;
  CHECK(phase_at(p, {1.0, 2.0}, {3.0, 4.0}) == 0.7);
}

TEST_CASE("phase_at grid variant is two-valued, cell-keyed and deterministic") {
  PhaseProfile p;
  p.variant = PhaseVariant::grid;
  p.grid_cell = 10.0;
  p.grid_seed = 3;
  RngStream rng(7);
  bool saw_zero = false, saw_pi = false;
  for (int i = 0; i < 500; ++i) {
    const Wavevector kw{rng.uniform(-100.0, 100.0), rng.uniform(0.0, 150.0)};
    const Wavevector kr{rng.uniform(-100.0, 100.0), rng.uniform(0.0, 150.0)};
    const double v = phase_at(p, kw, kr);
    CHECK((v == 0.0 || v == doctest::Approx(3.14159265358979)));
    saw_zero |= v == 0.0;
    saw_pi |= v > 1.0;
    // Depends on k_w's cell only.
    CHECK(phase_at(p, kw, {0.0, 0.0}) == v);
    const Wavevector same_cell{std::floor(kw.x / 10.0) * 10.0 + 0.5,
                               std::floor(kw.y / 10.0) * 10.0 + 0.5};
    CHECK(phase_at(p, same_cell, kr) == v);
  }
  CHECK(saw_zero);
  CHECK(saw_pi);
}

TEST_CASE("correlation_density peak, falloff and symmetry") {
  CorrelationKernel k{4.0, 6.0};
  const double peak = correlation_density(k, {0, 0}, {0, 0});
  CHECK(peak == doctest::Approx(1.0 / (2.0 * 3.14159265358979 * 4.0 * 6.0)));
  CHECK(correlation_density(k, {4.0, 0.0}, {0.0, 0.0}) ==
        doctest::Approx(peak * std::exp(-0.5)));
  RngStream rng(11);
  for (int i = 0; i < 200; ++i) {
    const Wavevector a{rng.uniform(-20, 20), rng.uniform(-20, 20)};
    const Wavevector b{rng.uniform(-20, 20), rng.uniform(-20, 20)};
    CHECK(correlation_density(k, a, b) == doctest::Approx(correlation_density(k, b, a)));
  }
}

TEST_CASE("correlation_density integrates to one") {
  // Simpson quadrature over +-6 sigma per axis.
  CorrelationKernel k{3.0, 5.0};
  const int n = 240;  // even
  const double ax = 6.0 * k.sigma_x, ay = 6.0 * k.sigma_y;
  const double hx = 2.0 * ax / n, hy = 2.0 * ay / n;
  auto wsimp = [n](int i) { return i == 0 || i == n ? 1.0 : (i % 2 ? 4.0 : 2.0); };
  double total = 0.0;
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j) {
      const Wavevector d{-ax + i * hx, -ay + j * hy};
      total += wsimp(i) * wsimp(j) * correlation_density(k, d, {0.0, 0.0});
    }
  total *= hx * hy / 9.0;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("sum_diff_coords roundtrip and examples") {
  {
    const auto sd = sum_diff_coords({3, 4}, {3, 4});
    CHECK(sd.x_s == 3.0);
    CHECK(sd.y_s == 4.0);
    CHECK(sd.x_d == 0.0);
    CHECK(sd.y_d == 0.0);
  }
  {
    const auto sd = sum_diff_coords({1, 0}, {0, 1});
    CHECK(sd.x_s == 0.5);
    CHECK(sd.y_s == 0.5);
    CHECK(sd.x_d == 1.0);
    CHECK(sd.y_d == -1.0);
  }
  RngStream rng(5);
  for (int i = 0; i < 1000; ++i) {
    const Wavevector a{rng.uniform(-50, 50), rng.uniform(-50, 50)};
    const Wavevector b{rng.uniform(-50, 50), rng.uniform(-50, 50)};
    const auto [ra, rb] = sum_diff_inverse(sum_diff_coords(a, b));
    CHECK(ra.x == doctest::Approx(a.x).epsilon(1e-14));
    CHECK(ra.y == doctest::Approx(a.y).epsilon(1e-14));
    CHECK(rb.x == doctest::Approx(b.x).epsilon(1e-14));
    CHECK(rb.y == doctest::Approx(b.y).epsilon(1e-14));
  }
}

TEST_CASE("pixel mapping round trips through pixel centers") {
  const auto g = toy_geom();
  for (int ix = 0; ix < g.width_px; ix += 7)
    for (int iy = 0; iy < g.height_px; iy += 11) {
      const auto [jx, jy] = g.to_pixel(g.pixel_center(ix, iy));
      CHECK(jx == ix);
      CHECK(jy == iy);
    }
}
