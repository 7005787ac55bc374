#pragma once
#include <cstdint>

#include "bellmux/core/geometry.hpp"

namespace bellmux {

enum class PhaseVariant : std::uint8_t { constant, linear, grid };

/// Interferometer phase between the H and V components as a function of
/// the photon wavevectors. The linear variant evaluates
/// a_w . k_w + a_r . k_r + phi0; the grid variant assigns 0 or pi per
/// rectangular cell of the observed region, keyed on k_w only.
struct PhaseProfile {
  PhaseVariant variant = PhaseVariant::linear;
  Wavevector a_w{0.0, 0.033};  ///< write-arm gradient [rad per rad/mm]
  Wavevector a_r{0.0, 0.033};  ///< read-arm gradient [rad per rad/mm]
  double phi0 = 0.0;           ///< constant offset [rad]
  double grid_cell = 30.0;     ///< grid variant: cell size [rad/mm]
  std::uint64_t grid_seed = 7;

  /// Total gradient seen in sum coordinates when a_w == a_r.
  Wavevector total_gradient() const { return a_w + a_r; }

  void validate() const;
};

double phase_at(const PhaseProfile& profile, Wavevector k_w, Wavevector k_r);

}  // namespace bellmux
