#pragma once

#include "glat/tiles/cross_tile.hpp"
#include "glat/tiles/solid_tile.hpp"
#include "glat/tiles/tile_spec.hpp"

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

namespace glat {

/// Depth of the face stubs of the diagonal tile, as a fraction of the cell.
inline constexpr double kDiagonalStubDepth = 0.25;

namespace detail {

/// Pairs of adjacent faces (the 12 edges of the face-centre octahedron).
inline std::vector<std::pair<int, int>> adjacent_face_pairs() {
  std::vector<std::pair<int, int>> out;
  for (int f = 0; f < 6; ++f)
    for (int g = f + 1; g < 6; ++g)
      if (face_axis(f) != face_axis(g)) out.emplace_back(f, g);
  return out;
}

/// Control polygon and knots of one diagonal strut axis between the stub
/// ends of faces f and g, with corner blend length c (0 = sharp).
inline std::pair<KnotVector, std::vector<Vec3>> diagonal_axis(int f, int g, double c) {
  const Vec3 nf = face_inward_normal(f), ng = face_inward_normal(g);
  const Vec3 A = face_center(f) + kDiagonalStubDepth * nf;
  const Vec3 B = face_center(g) + kDiagonalStubDepth * ng;
  if (c <= 0) return {KnotVector::bezier(1), {A, B}};
  const Vec3 d = (B - A).normalized();
  const Vec3 p2 = A + c * d, p4 = B - c * d;
  std::vector<Vec3> pts{A - c * nf, A, p2, 0.5 * (p2 + p4), p4, B, B - c * ng};
  KnotVector kv(2, {0, 0, 0, 1.0 / 3, 1.0 / 3, 2.0 / 3, 2.0 / 3, 1, 1, 1});
  return {kv, pts};
}

}  // namespace detail

/// Corner blend length of the rounded diagonal tile.
inline double diagonal_corner_blend(const TileSpec& spec) {
  const double strut = std::sqrt(2.0) * (0.5 - kDiagonalStubDepth);
  return std::min(spec.roundness * spec.arm_thickness, 0.45 * std::min(kDiagonalStubDepth, strut));
}

/// Diagonal cross: short stubs enter every face centre at right angles and
/// twelve struts join the stub ends of adjacent faces. With roundness > 0 the
/// stub/strut junctions are blended by quadratic arcs. Stub thickness is per
/// face (graded lattices); struts use the nominal thickness.
inline SolidTile make_diagonal_tile(const TileSpec& spec, const FaceThickness& face_thickness) {
  if (spec.kind != TileKind::CrossDiagonal) throw ParameterError("make_diagonal_tile requires kind diagonal");
  spec.validate();
  const double t = spec.arm_thickness;
  const double c = diagonal_corner_blend(spec);
  SolidTile tile;

  for (int f = 0; f < 6; ++f) {
    const Vec3 n = face_inward_normal(f);
    const Vec3 from = face_center(f);
    const Vec3 to = from + (kDiagonalStubDepth - c) * n;
    Vec3 b = Vec3::Zero();
    b[(face_axis(f) + 1) % 3] = 1.0;
    tile.pieces.push_back({sweep_square(KnotVector::bezier(1), {from, to}, face_thickness[f], b), PieceRole::Arm, f});
    tile.centerlines.push_back({{to, from}, face_thickness[f], f});
    if (spec.attach_faces[f] && spec.skin_thickness > 0)
      tile.pieces.push_back({skin_slab(f, spec.skin_thickness), PieceRole::Skin});
  }

  for (auto [f, g] : detail::adjacent_face_pairs()) {
    auto [kv, axis] = detail::diagonal_axis(f, g, c);
    const Vec3 b = face_inward_normal(f).cross(face_inward_normal(g)).normalized();
    tile.pieces.push_back({sweep_square(kv, axis, t, b), PieceRole::Arm});

    Centerline cl;
    cl.thickness = t;
    if (c <= 0) {
      cl.points = axis;
    } else {
      TensorSpline<1, 3> curve({kv}, std::vector<Vec3>(axis.begin(), axis.end()));
      const double params[] = {0.0, 1.0 / 6, 1.0 / 3, 2.0 / 3, 5.0 / 6, 1.0};
      for (double u : params) cl.points.push_back(curve.eval({u}));
    }
    tile.centerlines.push_back(std::move(cl));
  }
  return tile;
}

inline SolidTile make_diagonal_tile(const TileSpec& spec) {
  FaceThickness t;
  t.fill(spec.arm_thickness);
  return make_diagonal_tile(spec, t);
}

}  // namespace glat
