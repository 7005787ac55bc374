#include "bellmux/analytic/werner.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace bellmux {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_angle(double a) {
  a = std::fmod(a, kTwoPi);
  if (a < 0.0) a += kTwoPi;
  return a;
}
}  // namespace

void WernerState::validate() const {
  if (!(visibility >= 0.0) || !(visibility <= 1.0))
    throw std::invalid_argument("werner: visibility must lie in [0, 1]");
  if (!std::isfinite(phase)) throw std::invalid_argument("werner: phase must be finite");
}

double bell_expectation(const WernerState& state, const MeasurementSetting& setting) {
  return state.visibility * std::cos(state.phase + setting.xi_w + setting.xi_r);
}

std::array<double, 4> joint_outcome_probs(const WernerState& state,
                                          const MeasurementSetting& setting) {
  const double e = bell_expectation(state, setting);
  return {0.25 * (1.0 + e), 0.25 * (1.0 - e), 0.25 * (1.0 - e), 0.25 * (1.0 + e)};
}

double bell_parameter(const std::array<std::array<double, 2>, 2>& e) {
  return e[0][0] + e[0][1] + e[1][0] - e[1][1];
}

BasisPair optimal_bases(double phi) {
  const double base = -0.5 * phi;
  BasisPair b;
  b.xi_w = {wrap_angle(base), wrap_angle(base + 0.5 * std::numbers::pi)};
  b.xi_r = {wrap_angle(base - 0.25 * std::numbers::pi), wrap_angle(base + 0.25 * std::numbers::pi)};
  return b;
}

double bell_parameter_for(const WernerState& state, const BasisPair& bases) {
  std::array<std::array<double, 2>, 2> e{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      e[i][j] = bell_expectation(state, {bases.xi_w[j], bases.xi_r[i]});
  return bell_parameter(e);
}

WernerMonotones werner_monotones(const WernerState& state) {
  const double v = state.visibility;
  return {std::max(0.0, (3.0 * v - 1.0) / 2.0), std::max(0.0, (3.0 * v - 1.0) / 4.0)};
}

std::array<std::complex<double>, 16> werner_density(const WernerState& state) {
  using cd = std::complex<double>;
  const double v = state.visibility;
  const cd off = 0.5 * v * std::polar(1.0, state.phase);  // <VV| coefficient of |HH> row conj
  std::array<cd, 16> rho{};
  const double diag_id = (1.0 - v) / 4.0;
  rho[0 * 4 + 0] = diag_id + 0.5 * v;
  rho[1 * 4 + 1] = diag_id;
  rho[2 * 4 + 2] = diag_id;
  rho[3 * 4 + 3] = diag_id + 0.5 * v;
  rho[0 * 4 + 3] = std::conj(off);
  rho[3 * 4 + 0] = off;
  return rho;
}

std::array<std::complex<double>, 4> analyzer_operator(double xi) {
  using cd = std::complex<double>;
  // Equatorial analyzer with the orientation that yields
  // E = V cos(phi + xi_w + xi_r) for the pair state used here.
  return {cd(0.0, 0.0), std::polar(1.0, xi), std::polar(1.0, -xi), cd(0.0, 0.0)};
}

}  // namespace bellmux
