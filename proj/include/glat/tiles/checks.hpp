#pragma once

#include "glat/core/error.hpp"
#include "glat/core/quadrature.hpp"
#include "glat/core/types.hpp"
#include "glat/tiles/beam_graph.hpp"
#include "glat/tiles/solid_tile.hpp"
#include "glat/tiles/tile_spec.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

namespace glat {

struct FaceInterface {
  bool touched = false;    // some piece ends on this face
  bool full_face = false;  // a skin or flare covers the whole face
  int arm_count = 0;
  double centroid_error = 0.0;  // max distance of an arm section centroid from the face centre
  double angle_error = 0.0;     // max angle (rad) between an arm axis and the face normal
  bool pass = false;
};

struct InterfaceReport {
  std::array<FaceInterface, 6> faces;
  bool pass = false;
};

inline constexpr double kInterfacePositionTol = 1e-6;
inline constexpr double kInterfaceAngleTol = 1e-6;

namespace detail {

/// Cube face on which the whole parametric boundary (dir, side) lies, or -1.
inline int boundary_on_cube_face(const SplineVolume& v, int dir, int side, double tol = 1e-9) {
  const auto c = v.counts();
  for (int a = 0; a < 3; ++a)
    for (int s = 0; s < 2; ++s) {
      bool all = true;
      for (int j = 0; j < c[(dir + 2) % 3] && all; ++j)
        for (int i = 0; i < c[(dir + 1) % 3] && all; ++i) {
          SplineVolume::Index ijk{};
          ijk[dir] = side ? c[dir] - 1 : 0;
          ijk[(dir + 1) % 3] = i;
          ijk[(dir + 2) % 3] = j;
          if (std::abs(v.at(ijk)[a] - s) > tol) all = false;
        }
      if (all) return 2 * a + s;
    }
  return -1;
}

struct BoundaryStats {
  double area = 0.0;
  Vec3 centroid = Vec3::Zero();
  double max_angle = 0.0;
};

/// Area, centroid and the worst transversal-tangent angle to `axis` over the
/// boundary (dir, side) of a volume.
inline BoundaryStats boundary_stats(const SplineVolume& v, int dir, int side, int axis) {
  const int a = (dir + 1) % 3, b = (dir + 2) % 3;
  std::array<std::vector<std::pair<double, double>>, 2> rules;
  for (int k = 0; k < 2; ++k) {
    const int d = k ? b : a;
    const auto bp = v.knots(d).breakpoints();
    for (std::size_t s = 0; s + 1 < bp.size(); ++s) {
      auto r = gauss_legendre(v.degree(d) + 4, bp[s], bp[s + 1]);
      rules[k].insert(rules[k].end(), r.begin(), r.end());
    }
  }
  BoundaryStats st;
  SplineVolume::Param t{};
  t[dir] = side ? v.domain(dir).second : v.domain(dir).first;
  for (const auto& [ta, wa] : rules[0])
    for (const auto& [tb, wb] : rules[1]) {
      t[a] = ta;
      t[b] = tb;
      Vec3 x;
      SplineVolume::Jacobian j;
      v.eval_with_jacobian(t, x, j);
      const double dA = Vec3(j.col(a)).cross(Vec3(j.col(b))).norm() * wa * wb;
      st.area += dA;
      st.centroid += dA * x;
      const Vec3 tan = j.col(dir);
      Vec3 lateral = tan;
      lateral[axis] = 0.0;
      st.max_angle = std::max(st.max_angle, std::atan2(lateral.norm(), std::abs(tan[axis])));
    }
  if (st.area > 0) st.centroid /= st.area;
  return st;
}

}  // namespace detail

/// Checks that arms end centred on the cube faces and cross them at right
/// angles. `required` faces must be reached by an arm or covered by a skin.
inline InterfaceReport check_interface_compatibility(const SolidTile& tile, FaceSet required = FaceSet().set()) {
  InterfaceReport rep;
  for (const auto& piece : tile.pieces) {
    for (int dir = 0; dir < 3; ++dir)
      for (int side = 0; side < 2; ++side) {
        const int f = detail::boundary_on_cube_face(piece.volume, dir, side);
        if (f < 0) continue;
        auto st = detail::boundary_stats(piece.volume, dir, side, face_axis(f));
        auto& fr = rep.faces[f];
        if (piece.role == PieceRole::Skin || piece.role == PieceRole::Flare) {
          if (std::abs(st.area - 1.0) < 1e-9) {
            fr.touched = true;
            fr.full_face = true;
          }
          continue;
        }
        fr.touched = true;
        ++fr.arm_count;
        fr.centroid_error = std::max(fr.centroid_error, (st.centroid - face_center(f)).norm());
        fr.angle_error = std::max(fr.angle_error, st.max_angle);
      }
  }
  rep.pass = true;
  for (int f = 0; f < 6; ++f) {
    auto& fr = rep.faces[f];
    fr.pass = fr.touched && fr.centroid_error <= kInterfacePositionTol && fr.angle_error <= kInterfaceAngleTol;
    if (!fr.touched && !required[f]) fr.pass = true;
    rep.pass = rep.pass && fr.pass;
  }
  return rep;
}

struct EdgeViolation {
  int edge = 0;
  double angle_deg = 0.0;
};

struct PrintabilityReport {
  std::vector<EdgeViolation> violations;
  std::vector<int> unsupported_nodes;  // nodes above the base with no lower neighbour
  double max_angle_deg = 0.0;
  bool pass() const { return violations.empty() && unsupported_nodes.empty(); }
};

/// Angle in degrees between a strut direction and the growth axis, folded to [0, 90].
inline double growth_angle_deg(const Vec3& dir, const Vec3& growth) {
  const Vec3 g = growth.normalized();
  const double along = std::abs(dir.dot(g));
  const double across = (dir - dir.dot(g) * g).norm();
  return rad2deg(std::atan2(across, along));
}

inline PrintabilityReport check_printability(const BeamGraph& graph, const Vec3& growth = Vec3::UnitZ(),
                                             double max_angle = 60.0) {
  if (!(growth.norm() > 0)) throw ParameterError("growth direction must be non-zero");
  if (!(max_angle > 0 && max_angle <= 90)) throw ParameterError("max_angle must lie in (0, 90] degrees");
  const Vec3 g = growth.normalized();
  PrintabilityReport rep;
  for (std::size_t i = 0; i < graph.edges.size(); ++i) {
    const auto& e = graph.edges[i];
    const double ang = growth_angle_deg(graph.nodes[e.b] - graph.nodes[e.a], g);
    rep.max_angle_deg = std::max(rep.max_angle_deg, ang);
    if (ang > max_angle + 1e-9) rep.violations.push_back({int(i), ang});
  }
  if (graph.nodes.empty()) return rep;

  std::vector<double> h(graph.nodes.size());
  for (std::size_t i = 0; i < h.size(); ++i) h[i] = graph.nodes[i].dot(g);
  const double base = *std::min_element(h.begin(), h.end());
  const double tol = 1e-9 * std::max(1.0, graph.bounds().diagonal());
  std::vector<char> supported(h.size(), 1);
  for (const auto& e : graph.edges) supported[e.a] = supported[e.b] = 0;
  for (std::size_t i = 0; i < h.size(); ++i)
    if (h[i] <= base + tol) supported[i] = 1;
  for (const auto& e : graph.edges) {
    if (h[e.a] < h[e.b] - tol) supported[e.b] = 1;
    if (h[e.b] < h[e.a] - tol) supported[e.a] = 1;
  }
  for (std::size_t i = 0; i < h.size(); ++i)
    if (!supported[i]) rep.unsupported_nodes.push_back(int(i));
  return rep;
}

}  // namespace glat
