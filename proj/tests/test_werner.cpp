#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>

#include "bellmux/analytic/werner.hpp"
#include "bellmux/sim/rng.hpp"

using namespace bellmux;
using Dense = Eigen::Matrix4cd;
using cd = std::complex<double>;

namespace {

Dense to_eigen(const std::array<cd, 16>& m) {
  Dense d;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) d(i, j) = m[i * 4 + j];
  return d;
}

/// Tensor product with the read qubit in the first slot.
Dense kron2(const std::array<cd, 4>& a, const std::array<cd, 4>& b) {
  Dense d;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) d(2 * i + k, 2 * j + l) = a[i * 2 + j] * b[k * 2 + l];
  return d;
}

/// Wootters concurrence of an arbitrary two-qubit density matrix.
double concurrence_dense(const Dense& rho) {
  Dense sy2 = Dense::Zero();
  sy2(0, 3) = -1.0;
  sy2(1, 2) = 1.0;
  sy2(2, 1) = 1.0;
  sy2(3, 0) = -1.0;
  const Dense r = rho * sy2 * rho.conjugate() * sy2;
  Eigen::ComplexEigenSolver<Dense> es(r, false);
  std::array<double, 4> lam{};
  for (int i = 0; i < 4; ++i) lam[i] = std::sqrt(std::max(0.0, es.eigenvalues()[i].real()));
  std::sort(lam.begin(), lam.end(), std::greater<>());
  return std::max(0.0, lam[0] - lam[1] - lam[2] - lam[3]);
}

/// Negativity from the partial transpose over the second qubit.
double negativity_dense(const Dense& rho) {
  Dense pt;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) pt(2 * i + l, 2 * j + k) = rho(2 * i + k, 2 * j + l);
  Eigen::SelfAdjointEigenSolver<Dense> es(pt);
  double neg = 0.0;
  for (int i = 0; i < 4; ++i) neg += std::max(0.0, -es.eigenvalues()[i]);
  return neg;
}

}  // namespace

TEST_CASE("bell_expectation closed form matches the dense trace") {
  RngStream rng(101);
  for (int i = 0; i < 100; ++i) {
    const WernerState st{rng.uniform(), rng.uniform(0.0, 6.2831853)};
    const MeasurementSetting set{rng.uniform(0.0, 6.2831853), rng.uniform(0.0, 6.2831853)};
    const Dense rho = to_eigen(werner_density(st));
    const Dense op = kron2(analyzer_operator(set.xi_r), analyzer_operator(set.xi_w));
    const double dense = (op * rho).trace().real();
    CHECK(bell_expectation(st, set) == doctest::Approx(dense).epsilon(1e-12));
  }
}

TEST_CASE("bell_expectation examples") {
  CHECK(bell_expectation({1.0, 0.0}, {0.0, 0.0}) == doctest::Approx(1.0));
  CHECK(bell_expectation({0.92, 0.0}, {std::numbers::pi / 4, std::numbers::pi / 4}) ==
        doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("werner density is a unit-trace PSD matrix with min eigenvalue (1-V)/4") {
  RngStream rng(7);
  for (int i = 0; i < 50; ++i) {
    const WernerState st{rng.uniform(), rng.uniform(0.0, 6.2831853)};
    const Dense rho = to_eigen(werner_density(st));
    CHECK(rho.trace().real() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK((rho - rho.adjoint()).norm() == doctest::Approx(0.0));
    Eigen::SelfAdjointEigenSolver<Dense> es(rho);
    CHECK(es.eigenvalues().minCoeff() == doctest::Approx((1.0 - st.visibility) / 4.0));
  }
}

TEST_CASE("joint_outcome_probs is a distribution with uniform marginals") {
  RngStream rng(55);
  for (int i = 0; i < 10000; ++i) {
    const WernerState st{rng.uniform(), rng.uniform(0.0, 6.2831853)};
    const MeasurementSetting set{rng.uniform(0.0, 6.2831853), rng.uniform(0.0, 6.2831853)};
    const auto p = joint_outcome_probs(st, set);
    double sum = 0.0;
    for (const double v : p) {
      CHECK(v >= 0.0);
      sum += v;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(p[0] + p[1] == doctest::Approx(0.5).epsilon(1e-12));  // P(s_w = +)
    CHECK(p[0] + p[2] == doctest::Approx(0.5).epsilon(1e-12));  // P(s_r = +)
    const double e = p[0] - p[1] - p[2] + p[3];
    CHECK(e == doctest::Approx(bell_expectation(st, set)).epsilon(1e-12));
  }
}

TEST_CASE("joint_outcome_probs equals projector expectations of the dense matrix") {
  RngStream rng(77);
  for (int i = 0; i < 100; ++i) {
    const WernerState st{rng.uniform(), rng.uniform(0.0, 6.2831853)};
    const MeasurementSetting set{rng.uniform(0.0, 6.2831853), rng.uniform(0.0, 6.2831853)};
    const Dense rho = to_eigen(werner_density(st));
    const auto p = joint_outcome_probs(st, set);
    int idx = 0;
    for (const int sw : {+1, -1})
      for (const int sr : {+1, -1}) {
        // Projector onto the +-1 analyzer eigenvectors (|H> + s e^{-i xi}|V>)/sqrt(2).
        Eigen::Vector2cd vw, vr;
        vw << 1.0, static_cast<double>(sw) * std::polar(1.0, -set.xi_w);
        vr << 1.0, static_cast<double>(sr) * std::polar(1.0, -set.xi_r);
        vw /= std::sqrt(2.0);
        vr /= std::sqrt(2.0);
        Eigen::Vector4cd v;
        // Read qubit first.
        v << vr[0] * vw[0], vr[0] * vw[1], vr[1] * vw[0], vr[1] * vw[1];
        const double prob = (v.adjoint() * rho * v)(0, 0).real();
        CHECK(p[idx] == doctest::Approx(prob).epsilon(1e-12));
        ++idx;
      }
  }
}

TEST_CASE("bell_parameter examples") {
  CHECK(bell_parameter({{{0.0, 0.0}, {0.0, 0.0}}}) == 0.0);
  const double q = 1.0 / std::sqrt(2.0);
  CHECK(bell_parameter({{{q, q}, {q, -q}}}) == doctest::Approx(2.0 * std::sqrt(2.0)));
}

TEST_CASE("optimal bases reach 2 sqrt(2) V and the paper amplitude at V = 0.92") {
  RngStream rng(31);
  for (int i = 0; i < 1000; ++i) {
    const WernerState st{rng.uniform(), rng.uniform(0.0, 6.2831853)};
    const double s = bell_parameter_for(st, optimal_bases(st.phase));
    CHECK(s == doctest::Approx(2.0 * std::sqrt(2.0) * st.visibility).epsilon(1e-10));
    CHECK(std::abs(s) <= 2.0 * std::sqrt(2.0) + 1e-12);
  }
  CHECK(bell_parameter_for({0.92, 1.3}, optimal_bases(1.3)) == doctest::Approx(2.60).epsilon(2e-3));
  CHECK(bell_parameter_for({1.0 / std::sqrt(2.0), 0.0}, optimal_bases(0.0)) ==
        doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("optimal bases survive an exhaustive search refined to 1e-3 rad") {
  // S depends only on a_j = phi/2 + xi_w(j) and b_i = phi/2 + xi_r(i),
  // with a free overall gauge; fix a1 = 0 and search (a2, b1, b2).
  const double phi = 0.8;
  const WernerState st{0.77, phi};
  const double claimed = bell_parameter_for(st, optimal_bases(phi));

  const auto s_of = [&](double a2, double b1, double b2) {
    return std::abs(std::cos(b1) + std::cos(b2) + std::cos(a2 + b1) - std::cos(a2 + b2)) *
           st.visibility;
  };
  const double tp = 2.0 * std::numbers::pi;
  const int n = 60;
  double best = 0.0, ba = 0.0, bb1 = 0.0, bb2 = 0.0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) {
        const double s = s_of(a * tp / n, b * tp / n, c * tp / n);
        if (s > best) {
          best = s;
          ba = a * tp / n;
          bb1 = b * tp / n;
          bb2 = c * tp / n;
        }
      }
  double step = tp / n;
  while (step > 1e-3) {
    step *= 0.5;
    bool improved = true;
    while (improved) {
      improved = false;
      for (int da = -1; da <= 1; ++da)
        for (int db = -1; db <= 1; ++db)
          for (int dc = -1; dc <= 1; ++dc) {
            const double s = s_of(ba + da * step, bb1 + db * step, bb2 + dc * step);
            if (s > best + 1e-15) {
              best = s;
              ba += da * step;
              bb1 += db * step;
              bb2 += dc * step;
              improved = true;
            }
          }
    }
  }
  CHECK(claimed == doctest::Approx(best).epsilon(1e-5));
}

TEST_CASE("gauge shift of all angles with compensating phase keeps |S|") {
  const double phi = 0.4;
  const WernerState st{0.9, phi};
  const double s0 = std::abs(bell_parameter_for(st, optimal_bases(phi)));
  for (const double theta : {0.3, 1.1, 2.9}) {
    BasisPair bp = optimal_bases(phi);
    for (auto& x : bp.xi_w) x += theta;
    for (auto& x : bp.xi_r) x += theta;
    // E depends on phi + xi_w + xi_r, so shifting both angles by theta
    // is compensated by phi -> phi - 2 theta.
    const WernerState shifted{0.9, phi - 2.0 * theta};
    const double s1 = std::abs(bell_parameter_for(shifted, bp));
    CHECK(s1 == doctest::Approx(s0).epsilon(1e-10));
  }
}

TEST_CASE("werner monotones match the dense-matrix routes") {
  CHECK(werner_monotones({1.0, 0.0}).concurrence == doctest::Approx(1.0));
  CHECK(werner_monotones({1.0, 0.0}).negativity == doctest::Approx(0.5));
  CHECK(werner_monotones({1.0 / 3.0, 0.0}).concurrence == doctest::Approx(0.0));
  CHECK(werner_monotones({1.0 / 3.0, 0.0}).negativity == doctest::Approx(0.0));
  CHECK(werner_monotones({1.0 / std::sqrt(2.0), 0.0}).concurrence ==
        doctest::Approx(0.5607).epsilon(1e-3));

  RngStream rng(13);
  for (int i = 0; i < 40; ++i) {
    const WernerState st{rng.uniform(), rng.uniform(0.0, 6.2831853)};
    const Dense rho = to_eigen(werner_density(st));
    const auto mono = werner_monotones(st);
    CHECK(mono.concurrence == doctest::Approx(concurrence_dense(rho)).epsilon(1e-9));
    CHECK(mono.negativity == doctest::Approx(negativity_dense(rho)).epsilon(1e-9));
  }
}
