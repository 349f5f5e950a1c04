#pragma once

#include "glat/core/error.hpp"
#include "glat/core/types.hpp"
#include "glat/spline/geometry.hpp"
#include "glat/spline/tensor_spline.hpp"
#include "glat/tiles/tile_spec.hpp"

#include <array>
#include <cmath>
#include <vector>

namespace glat {

enum class PieceRole { Hub, Arm, Skin, Flare };

struct TilePiece {
  SplineVolume volume;
  PieceRole role = PieceRole::Arm;
  int face = -1;  // cube face an arm piece ends on, if any
};

/// Strut axis of a solid tile, used for beam reduction. `face` is the cube face
/// reached by points.back(), or -1 for interior struts.
struct Centerline {
  std::vector<Vec3> points;
  double thickness = 0.0;
  int face = -1;
};

/// Solid tile: spline pieces mapping into the unit cube plus the strut axes.
struct SolidTile {
  std::vector<TilePiece> pieces;
  std::vector<Centerline> centerlines;
};

/// Sum of the piece volumes (pieces may overlap at junctions).
inline double piece_volume_sum(const SolidTile& t) {
  double v = 0.0;
  for (const auto& p : t.pieces) v += spline_volume(p.volume);
  return v;
}

inline SolidTile translated(const SolidTile& t, const Vec3& shift) {
  SolidTile out = t;
  for (auto& p : out.pieces)
    for (auto& c : p.volume.control()) c += shift;
  for (auto& cl : out.centerlines)
    for (auto& q : cl.points) q += shift;
  return out;
}

/// Axis-aligned slab of the given depth lying against a cube face.
inline SplineVolume skin_slab(int face, double depth) {
  Vec3 lo = Vec3::Zero(), hi = Vec3::Ones();
  const int a = face_axis(face);
  if (face_side(face)) lo[a] = 1.0 - depth;
  else hi[a] = depth;
  return box_volume(lo, hi);
}

namespace detail {

/// Control point (sigma, tau) and weight of the 3x3 rounded-square section of
/// half-width h; rho = 0 gives the square, rho = 1 the inscribed disk.
inline void rounded_section(double h, double rho, std::array<Eigen::Vector2d, 9>& pts,
                            std::array<double, 9>& w) {
  const double s2 = std::sqrt(2.0);
  const double wd[3] = {1.0, 1.0 / s2, 1.0};
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < 3; ++i) {
      const Eigen::Vector2d sq((i - 1) * h, (j - 1) * h);
      Eigen::Vector2d disk;
      if (i != 1 && j != 1) disk = sq / s2;
      else if (i == 1 && j == 1) disk.setZero();
      else disk = sq * s2;
      pts[3 * j + i] = (1.0 - rho) * sq + rho * disk;
      w[3 * j + i] = (1.0 - rho) + rho * wd[i] * wd[j];
    }
}

}  // namespace detail

/// Prism of rounded-square section (side 2h) along cube axis `a`, between
/// coordinates a0 and a1 on that axis, centred on the cube's mid-line.
/// Parameters: (section s, section r, axial); oriented positively.
inline SplineVolume rounded_prism(int a, double a0, double a1, double h, double rho) {
  int b = (a + 1) % 3, c = (a + 2) % 3;
  if (a1 < a0) std::swap(b, c);
  std::array<Eigen::Vector2d, 9> sec;
  std::array<double, 9> sw;
  detail::rounded_section(h, rho, sec, sw);
  std::vector<Vec3> ctrl;
  std::vector<double> w;
  for (int k = 0; k < 2; ++k)
    for (int q = 0; q < 9; ++q) {
      Vec3 p;
      p[a] = k ? a1 : a0;
      p[b] = 0.5 + sec[q].x();
      p[c] = 0.5 + sec[q].y();
      ctrl.push_back(p);
      w.push_back(sw[q]);
    }
  const bool rational = rho > 0.0;
  return SplineVolume({KnotVector::bezier(2), KnotVector::bezier(2), KnotVector::bezier(1)}, std::move(ctrl),
                      rational ? std::move(w) : std::vector<double>{});
}

/// Square-section sweep along a planar B-spline axis curve. `binormal` is the
/// unit normal of the curve plane; section offsets at interior corners of the
/// control polygon are mitred. Parameters: (axis, s, r).
inline SplineVolume sweep_square(const KnotVector& kv, const std::vector<Vec3>& axis, double side,
                                 const Vec3& binormal) {
  const int n = int(axis.size());
  if (n != kv.count()) throw ParameterError("sweep axis does not match its knot vector");
  std::vector<Vec3> offset(n);
  for (int i = 0; i < n; ++i) {
    Vec3 tin = Vec3::Zero(), tout = Vec3::Zero();
    if (i > 0 && (axis[i] - axis[i - 1]).norm() > 0) tin = (axis[i] - axis[i - 1]).normalized();
    if (i + 1 < n && (axis[i + 1] - axis[i]).norm() > 0) tout = (axis[i + 1] - axis[i]).normalized();
    Vec3 t = tin + tout;
    if (t.norm() == 0) throw DegeneracyError("sweep axis folds back on itself");
    t.normalize();
    double miter = 1.0;
    if (tin.norm() > 0 && tout.norm() > 0) miter = 1.0 / tin.dot(t);
    offset[i] = binormal.cross(t) * miter;
  }
  std::vector<Vec3> ctrl;
  ctrl.reserve(4 * n);
  for (int r = 0; r < 2; ++r)
    for (int s = 0; s < 2; ++s)
      for (int i = 0; i < n; ++i)
        ctrl.push_back(axis[i] + (s - 0.5) * side * offset[i] + (r - 0.5) * side * binormal);
  return SplineVolume({kv, KnotVector::bezier(1), KnotVector::bezier(1)}, std::move(ctrl));
}

}  // namespace glat
