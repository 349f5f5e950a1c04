#pragma once

#include "glat/tiles/solid_tile.hpp"
#include "glat/tiles/tile_spec.hpp"

#include <array>
#include <cmath>

namespace glat {

using FaceThickness = std::array<double, 6>;

/// Axis-parallel cross: a cubic hub of side arm_thickness with six arms of
/// rounded-square section, each meeting its face centred and at right angles.
/// `face_thickness` overrides the section side per arm (grading).
inline SolidTile make_cross_tile(const TileSpec& spec, const FaceThickness& face_thickness) {
  if (spec.kind != TileKind::CrossAxis) throw ParameterError("make_cross_tile requires kind cross");
  spec.validate();
  for (double t : face_thickness)
    if (!(t > 0 && t < 0.5)) throw ParameterError("arm thickness must lie in (0, 0.5)");

  SolidTile tile;
  const double h = 0.5 * spec.arm_thickness;
  tile.pieces.push_back({box_volume(Vec3::Constant(0.5 - h), Vec3::Constant(0.5 + h)), PieceRole::Hub});

  for (int f = 0; f < 6; ++f) {
    const int a = face_axis(f);
    const double sign = face_side(f) ? 1.0 : -1.0;
    const double start = 0.5 + sign * h;
    const double hf = 0.5 * face_thickness[f];
    const double skin = spec.attach_faces[f] ? spec.skin_thickness : 0.0;
    const double end = face_side(f) ? 1.0 - skin : skin;

    if (spec.attach_faces[f]) {
      // Flare from the arm section at the hub to the whole face.
      std::array<Vec3, 8> corners;
      for (int k = 0; k < 8; ++k) {
        const int ix = k & 1, iy = (k >> 1) & 1, iz = (k >> 2) & 1;
        const int bits[3] = {ix, iy, iz};
        const bool outer = face_side(f) ? bits[a] == 1 : bits[a] == 0;
        Vec3 p;
        for (int d = 0; d < 3; ++d) {
          if (d == a) p[d] = outer ? end : start;
          else p[d] = outer ? double(bits[d]) : 0.5 + (bits[d] ? hf : -hf);
        }
        corners[k] = p;
      }
      tile.pieces.push_back({trilinear_volume(corners), PieceRole::Flare, -1});
      if (skin > 0) tile.pieces.push_back({skin_slab(f, skin), PieceRole::Skin});
    } else {
      tile.pieces.push_back({rounded_prism(a, start, face_side(f) ? 1.0 : 0.0, hf, spec.roundness), PieceRole::Arm, f});
    }
    tile.centerlines.push_back({{Vec3::Constant(0.5), face_center(f)}, face_thickness[f], f});
  }
  return tile;
}

inline SolidTile make_cross_tile(const TileSpec& spec) {
  FaceThickness t;
  t.fill(spec.arm_thickness);
  return make_cross_tile(spec, t);
}

}  // namespace glat
