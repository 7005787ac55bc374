#pragma once
#include <cmath>
#include <cstdint>
#include <utility>

namespace bellmux {

/// Transverse wavevector, canonical unit rad/mm.
struct Wavevector {
  double x = 0.0;
  double y = 0.0;

  double modulus() const { return std::hypot(x, y); }
};

inline Wavevector operator+(Wavevector a, Wavevector b) { return {a.x + b.x, a.y + b.y}; }
inline Wavevector operator-(Wavevector a, Wavevector b) { return {a.x - b.x, a.y - b.y}; }
inline Wavevector operator*(double s, Wavevector a) { return {s * a.x, s * a.y}; }

enum class Branch : std::uint8_t { H, V };

/// Camera grid in wavevector space. The observed region is the folded
/// half of the emission cone: pixel (ix, iy) covers
/// [origin + i*pitch, origin + (i+1)*pitch) per axis, and the full
/// observed y range must lie inside [0, y_max/2].
struct DetectorGeometry {
  double pixel_pitch = 2.38;  ///< rad/mm per px
  int width_px = 130;
  int height_px = 160;
  double y_max = 761.6;  ///< maximal y wavevector entering the fold [rad/mm]
  double origin_x = -154.7;
  double origin_y = 0.0;

  int n_px() const { return width_px * height_px; }
  double width_k() const { return width_px * pixel_pitch; }
  double height_k() const { return height_px * pixel_pitch; }
  double x_min() const { return origin_x; }
  double x_max() const { return origin_x + width_k(); }
  double y_min() const { return origin_y; }
  double y_top() const { return origin_y + height_k(); }
  double area() const { return width_k() * height_k(); }

  bool contains(Wavevector k) const {
    return k.x >= x_min() && k.x < x_max() && k.y >= y_min() && k.y < y_top();
  }

  /// Pixel index of a wavevector inside the observed region.
  std::pair<int, int> to_pixel(Wavevector k) const {
    return {static_cast<int>(std::floor((k.x - origin_x) / pixel_pitch)),
            static_cast<int>(std::floor((k.y - origin_y) / pixel_pitch))};
  }

  /// Wavevector of a pixel center.
  Wavevector pixel_center(int ix, int iy) const {
    return {origin_x + (ix + 0.5) * pixel_pitch, origin_y + (iy + 0.5) * pixel_pitch};
  }

  void validate() const;  // throws std::invalid_argument on bad fields
};

struct FoldedPoint {
  Wavevector k;
  Branch branch;
};

/// Map a raw emission-cone wavevector onto the observed (folded) region.
/// y < y_max/2 stays in the H half; the upper half is reflected about
/// y_max and labelled V. Requires 0 <= y <= y_max.
FoldedPoint fold_coordinates(Wavevector k_raw, const DetectorGeometry& geom);

/// Inverse of fold_coordinates for a given branch label.
Wavevector unfold_coordinates(Wavevector k_obs, Branch branch, const DetectorGeometry& geom);

/// Moduli of the two superimposed branch wavevectors at an observed point:
/// |k_H|^2 = x^2 + y^2 and |k_V|^2 = x^2 + (y_max - y)^2.
std::pair<double, double> branch_moduli(Wavevector k_obs, const DetectorGeometry& geom);

struct SumDiff {
  double x_s, y_s, x_d, y_d;
};

/// Sum/difference coordinates: s = (k_w + k_r)/2, d = k_w - k_r.
/// Volume preserving (the Jacobian of (k_w,k_r) -> (s,d) has |det| = 1).
inline SumDiff sum_diff_coords(Wavevector k_w, Wavevector k_r) {
  return {0.5 * (k_w.x + k_r.x), 0.5 * (k_w.y + k_r.y), k_w.x - k_r.x, k_w.y - k_r.y};
}

inline std::pair<Wavevector, Wavevector> sum_diff_inverse(const SumDiff& sd) {
  return {{sd.x_s + 0.5 * sd.x_d, sd.y_s + 0.5 * sd.y_d},
          {sd.x_s - 0.5 * sd.x_d, sd.y_s - 0.5 * sd.y_d}};
}

}  // namespace bellmux
