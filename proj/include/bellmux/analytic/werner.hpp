#pragma once
#include <array>
#include <complex>

#include "bellmux/core/types.hpp"

namespace bellmux {

/// Two-qubit Werner state: (1-V)/4 * Id + V |Phi(phi)><Phi(phi)| with
/// |Phi(phi)> = (|HH> + e^{i phi} |VV>)/sqrt(2).
struct WernerState {
  double visibility = 1.0;
  double phase = 0.0;

  void validate() const;
};

/// Correlation expectation for equatorial analyzers:
/// E = V cos(phi + xi_w + xi_r).
double bell_expectation(const WernerState& state, const MeasurementSetting& setting);

/// Joint port probabilities P(s_w, s_r) = (1 + s_w s_r E)/4 in the order
/// (+,+), (+,-), (-,+), (-,-). Sums to 1 with uniform marginals.
std::array<double, 4> joint_outcome_probs(const WernerState& state,
                                          const MeasurementSetting& setting);

/// CHSH combination E11 + E12 + E21 - E22 of a 2x2 expectation table
/// indexed E[read basis][write basis].
double bell_parameter(const std::array<std::array<double, 2>, 2>& expectations);

struct BasisPair {
  std::array<double, 2> xi_w;  ///< write-arm analyzer angles
  std::array<double, 2> xi_r;  ///< read-arm analyzer angles
};

/// Analyzer angles maximizing |S| for a Werner state of the given phase.
/// The achieved optimum is 2 sqrt(2) V.
BasisPair optimal_bases(double phi);

/// Bell parameter of a Werner state measured with a basis pair.
double bell_parameter_for(const WernerState& state, const BasisPair& bases);

struct WernerMonotones {
  double concurrence;
  double negativity;
};

/// Closed forms max(0, (3V-1)/2) and max(0, (3V-1)/4).
WernerMonotones werner_monotones(const WernerState& state);

/// Dense 4x4 density matrix in the basis {HH, HV, VH, VV} with the read
/// qubit in the first slot. Row-major. Intended for oracle cross-checks.
std::array<std::complex<double>, 16> werner_density(const WernerState& state);

/// Equatorial analyzer operator at angle xi, oriented so that the pair
/// correlation comes out as cos(phase + xi_w + xi_r).
std::array<std::complex<double>, 4> analyzer_operator(double xi);

}  // namespace bellmux
