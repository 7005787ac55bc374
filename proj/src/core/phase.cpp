#include "bellmux/core/phase.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace bellmux {

namespace {

std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

void PhaseProfile::validate() const {
  if (variant == PhaseVariant::grid && !(grid_cell > 0.0))
    throw std::invalid_argument("phase: grid cell size must be > 0");
}

double phase_at(const PhaseProfile& profile, Wavevector k_w, Wavevector k_r) {
  switch (profile.variant) {
    case PhaseVariant::constant:
      return profile.phi0;
    case PhaseVariant::linear:
      return profile.a_w.x * k_w.x + profile.a_w.y * k_w.y + profile.a_r.x * k_r.x +
             profile.a_r.y * k_r.y + profile.phi0;
    case PhaseVariant::grid: {
      const auto cx = static_cast<std::int64_t>(std::floor(k_w.x / profile.grid_cell));
      const auto cy = static_cast<std::int64_t>(std::floor(k_w.y / profile.grid_cell));
      const std::uint64_t h = mix64(mix64(profile.grid_seed + static_cast<std::uint64_t>(cx)) +
                                    static_cast<std::uint64_t>(cy));
      return (h & 1u) ? std::numbers::pi : 0.0;
    }
  }
  return profile.phi0;
}

}  // namespace bellmux
