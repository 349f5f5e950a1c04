#pragma once

#include "glat/tiles/auxetic_cell.hpp"
#include "glat/tiles/beam_graph.hpp"
#include "glat/tiles/checks.hpp"
#include "glat/tiles/cross_tile.hpp"
#include "glat/tiles/diagonal_tile.hpp"
#include "glat/tiles/solid_tile.hpp"
#include "glat/tiles/tile_spec.hpp"

#include <algorithm>
#include <variant>

namespace glat {

/// Solid spline tile or beam cell, in unit-cube coordinates.
using TileGeometry = std::variant<SolidTile, BeamGraph>;

inline TileGeometry make_tile(const TileSpec& spec) {
  switch (spec.kind) {
    case TileKind::CrossAxis: return make_cross_tile(spec);
    case TileKind::CrossDiagonal: return make_diagonal_tile(spec);
    case TileKind::AuxeticDoubleV: return make_auxetic_cell(spec);
  }
  throw ParameterError("unknown tile kind");
}

/// Largest distance by which the geometry leaves [0,1]^3 (control hulls for splines).
inline double unit_cube_excess(const TileGeometry& geo) {
  double worst = 0.0;
  auto check = [&](const Vec3& p) {
    for (int d = 0; d < 3; ++d) worst = std::max({worst, -p[d], p[d] - 1.0});
  };
  if (auto* s = std::get_if<SolidTile>(&geo)) {
    for (const auto& piece : s->pieces)
      for (const auto& c : piece.volume.control()) check(c);
  } else {
    for (const auto& n : std::get<BeamGraph>(geo).nodes) check(n);
  }
  return worst;
}

}  // namespace glat
