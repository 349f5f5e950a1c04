#pragma once

#include "glat/core/error.hpp"
#include "glat/core/types.hpp"
#include "glat/tiles/beam_graph.hpp"
#include "glat/tiles/tile_spec.hpp"

#include <array>
#include <cmath>
#include <map>
#include <vector>

namespace glat {

/// Inward offset of the kinked vertical strut at the cell top and bottom.
inline constexpr double kAuxeticKinkDepth = 0.1;
/// Height of the chevron vertex on each side face.
inline constexpr double kAuxeticVertexHeight = 0.5;

namespace detail {

/// Point on side face f (0..3) from in-face coordinate a, inward depth and height z.
inline Vec3 side_face_point(int f, double a, double depth, double z) {
  switch (f) {
    case 0: return {depth, a, z};
    case 1: return {1.0 - depth, a, z};
    case 2: return {a, depth, z};
    default: return {a, 1.0 - depth, z};
  }
}

struct FacePoint {
  double a, z;
  int band;  // period offset along z
};

/// Splits a periodic chevron segment at integer heights; returns the pieces in
/// cell-local (a, z) coordinates.
inline std::vector<std::array<Eigen::Vector2d, 2>> clip_periodic(const FacePoint& p, const FacePoint& q) {
  const double z0 = p.z + p.band, z1 = q.z + q.band;
  std::vector<std::pair<double, double>> cuts;  // (t, global z)
  cuts.emplace_back(0.0, z0);
  for (int m = int(std::floor(z0)) + 1; m < z1; ++m)
    if (m > z0) cuts.emplace_back((m - z0) / (z1 - z0), double(m));
  cuts.emplace_back(1.0, z1);

  std::vector<std::array<Eigen::Vector2d, 2>> out;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double ta = cuts[i].first, tb = cuts[i + 1].first;
    if (tb - ta < 1e-12) continue;
    const int band = int(std::floor(0.5 * (cuts[i].second + cuts[i + 1].second)));
    auto local = [&](std::size_t k) {
      const double t = cuts[k].first;
      if (k == 0) return Eigen::Vector2d(p.a, p.z + (p.band - band));
      if (k + 1 == cuts.size()) return Eigen::Vector2d(q.a, q.z + (q.band - band));
      return Eigen::Vector2d(p.a + t * (q.a - p.a), cuts[k].second - band);
    };
    out.push_back({local(i), local(i + 1)});
  }
  return out;
}

}  // namespace detail

/// Re-entrant double-V beam cell. Each side face carries a chevron pair with
/// vertex at mid-height: the inner V reaches up to the face corners, the outer
/// V continues into the next cell above. Arm inclination from horizontal is the
/// re-entrant angle. The optional kinked strut supports the chevron vertices.
/// Node coordinates are cell-local; radii are spec.strut_radius.
inline BeamGraph make_auxetic_cell(const TileSpec& spec) {
  if (spec.kind != TileKind::AuxeticDoubleV) throw ParameterError("make_auxetic_cell requires kind auxetic");
  spec.validate();
  const double d1 = 0.5 * std::tan(deg2rad(spec.reentrant_angle));
  const double zin = kAuxeticVertexHeight + d1 - 1.0;
  const int kin = int(std::floor(zin));
  const double zt = zin - kin;
  const detail::FacePoint vertex{0.5, kAuxeticVertexHeight, 0};

  BeamGraph g;
  std::map<std::array<double, 3>, int> ids;
  auto node = [&](const Vec3& p) {
    const std::array<double, 3> key{p.x() + 0.0, p.y() + 0.0, p.z() + 0.0};
    auto it = ids.find(key);
    if (it != ids.end()) return it->second;
    const int id = g.add_node(p);
    ids.emplace(key, id);
    return id;
  };
  auto edge = [&](const Vec3& p, const Vec3& q) { g.add_edge(node(p), node(q), spec.strut_radius); };

  for (int f = 0; f < 4; ++f) {
    for (double a : {0.0, 1.0})
      for (int band : {kin, kin + 1})
        for (const auto& piece : detail::clip_periodic(vertex, {a, zt, band}))
          edge(detail::side_face_point(f, piece[0].x(), 0.0, piece[0].y()),
               detail::side_face_point(f, piece[1].x(), 0.0, piece[1].y()));
    if (spec.include_vertical_strut) {
      const Vec3 n = detail::side_face_point(f, 0.5, 0.0, kAuxeticVertexHeight);
      edge(detail::side_face_point(f, 0.5, kAuxeticKinkDepth, 0.0), n);
      edge(n, detail::side_face_point(f, 0.5, kAuxeticKinkDepth, 1.0));
    }
  }
  return g;
}

}  // namespace glat
