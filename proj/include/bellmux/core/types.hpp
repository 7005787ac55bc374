#pragma once
#include <cstdint>

namespace bellmux {

enum class Arm : std::uint8_t { writeout, readout };

/// Beam-displacer output port, +1 or -1.
enum class Port : std::int8_t { plus = +1, minus = -1 };

inline int port_sign(Port p) { return static_cast<int>(p); }

/// Analyzer angles for one write/read basis combination [rad].
struct MeasurementSetting {
  double xi_w = 0.0;
  double xi_r = 0.0;
};

/// One detected photon. Pixel coordinates index the camera grid;
/// storage_time is the memory delay of the shot the hit belongs to [us].
struct PhotonHit {
  std::uint64_t shot = 0;
  Arm arm = Arm::writeout;
  std::uint16_t basis = 0;
  Port port = Port::plus;
  std::uint16_t ix = 0;
  std::uint16_t iy = 0;
  double storage_time = 0.0;
};

inline bool hit_order(const PhotonHit& a, const PhotonHit& b) {
  if (a.shot != b.shot) return a.shot < b.shot;
  return static_cast<int>(a.arm) < static_cast<int>(b.arm);
}

}  // namespace bellmux
