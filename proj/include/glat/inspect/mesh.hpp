#pragma once

#include "glat/core/error.hpp"
#include "glat/core/types.hpp"
#include "glat/spline/geometry.hpp"
#include "glat/spline/tensor_spline.hpp"
#include "glat/tiles/beam_graph.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace glat {

struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> triangles;

  bool empty() const { return triangles.empty(); }

  Vec3 corner(std::size_t t, int k) const { return vertices[std::size_t(triangles[t][k])]; }

  /// Unnormalised facet normal (twice the area).
  Vec3 area_normal(std::size_t t) const { return (corner(t, 1) - corner(t, 0)).cross(corner(t, 2) - corner(t, 0)); }

  double area() const {
    double a = 0.0;
    for (std::size_t t = 0; t < triangles.size(); ++t) a += 0.5 * area_normal(t).norm();
    return a;
  }

  void append(const TriangleMesh& o) {
    const int base = int(vertices.size());
    vertices.insert(vertices.end(), o.vertices.begin(), o.vertices.end());
    for (auto t : o.triangles) triangles.push_back({t[0] + base, t[1] + base, t[2] + base});
  }

  /// Reversed orientation.
  TriangleMesh flipped() const {
    TriangleMesh out = *this;
    for (auto& t : out.triangles) std::swap(t[1], t[2]);
    return out;
  }

  template <class F>
  TriangleMesh transformed(F&& f) const {
    TriangleMesh out = *this;
    for (auto& v : out.vertices) v = f(v);
    return out;
  }

  Aabb bounds() const {
    Aabb b;
    for (const auto& v : vertices) b.extend(v);
    return b;
  }

  /// Merges vertices closer than tol (grid hashing, first occurrence wins) and
  /// drops triangles that collapse.
  TriangleMesh welded(double tol) const {
    TriangleMesh out;
    std::map<std::array<long long, 3>, std::vector<int>> grid;
    std::vector<int> remap(vertices.size());
    const double h = tol > 0 ? tol : 1e-300;
    for (std::size_t i = 0; i < vertices.size(); ++i) {
      const Vec3& p = vertices[i];
      const std::array<long long, 3> key{(long long)std::floor(p.x() / h), (long long)std::floor(p.y() / h),
                                         (long long)std::floor(p.z() / h)};
      int found = -1;
      for (long long dx = -1; dx <= 1 && found < 0; ++dx)
        for (long long dy = -1; dy <= 1 && found < 0; ++dy)
          for (long long dz = -1; dz <= 1 && found < 0; ++dz) {
            auto it = grid.find({key[0] + dx, key[1] + dy, key[2] + dz});
            if (it == grid.end()) continue;
            for (int j : it->second)
              if ((out.vertices[std::size_t(j)] - p).norm() <= tol) {
                found = j;
                break;
              }
          }
      if (found < 0) {
        found = int(out.vertices.size());
        out.vertices.push_back(p);
        grid[key].push_back(found);
      }
      remap[i] = found;
    }
    for (auto t : triangles) {
      const std::array<int, 3> m{remap[std::size_t(t[0])], remap[std::size_t(t[1])], remap[std::size_t(t[2])]};
      if (m[0] != m[1] && m[1] != m[2] && m[0] != m[2]) out.triangles.push_back(m);
    }
    return out;
  }
};

/// Wavefront OBJ, vertices and triangular faces only.
inline void write_obj(std::ostream& os, const TriangleMesh& m) {
  os << "# glat triangle mesh\n";
  for (const auto& v : m.vertices)
    os << "v " << format_double(v.x()) << ' ' << format_double(v.y()) << ' ' << format_double(v.z()) << '\n';
  for (const auto& t : m.triangles) os << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
}

/// Reads v/f records; polygons are fanned, texture/normal indices ignored.
inline TriangleMesh read_obj(std::istream& is) {
  TriangleMesh m;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag) || tag[0] == '#') continue;
    if (tag == "v") {
      Vec3 p;
      if (!(ls >> p.x() >> p.y() >> p.z())) throw ParameterError("OBJ line " + std::to_string(lineno) + ": bad vertex");
      m.vertices.push_back(p);
    } else if (tag == "f") {
      std::vector<int> idx;
      std::string tok;
      while (ls >> tok) {
        const int i = std::stoi(tok.substr(0, tok.find('/')));
        idx.push_back(i > 0 ? i - 1 : int(m.vertices.size()) + i);
      }
      if (idx.size() < 3) throw ParameterError("OBJ line " + std::to_string(lineno) + ": face needs 3 vertices");
      for (std::size_t k = 1; k + 1 < idx.size(); ++k) m.triangles.push_back({idx[0], idx[k], idx[k + 1]});
    }
  }
  for (const auto& t : m.triangles)
    for (int i : t)
      if (i < 0 || i >= int(m.vertices.size())) throw ParameterError("OBJ face references a missing vertex");
  return m;
}

inline void write_obj_file(const std::string& path, const TriangleMesh& m) {
  std::ofstream os(path);
  if (!os) throw ParameterError("cannot write " + path);
  write_obj(os, m);
}

inline TriangleMesh read_obj_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ParameterError("cannot open mesh file " + path);
  return read_obj(is);
}

/// n x n quad grid over the parameter domain, split into triangles whose
/// winding follows S_u x S_v.
inline TriangleMesh tessellate_surface(const SplineSurface& s, int n) {
  if (n < 1) throw ParameterError("tessellation resolution must be at least 1");
  TriangleMesh m;
  auto [u0, u1] = s.domain(0);
  auto [v0, v1] = s.domain(1);
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) {
      const double u = i == n ? u1 : u0 + (u1 - u0) * i / n;
      const double v = j == n ? v1 : v0 + (v1 - v0) * j / n;
      m.vertices.push_back(s.eval({u, v}));
    }
  auto id = [&](int i, int j) { return i + (n + 1) * j; };
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      m.triangles.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      m.triangles.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  return m;
}

/// The six boundary faces of a volume, outward for positively oriented volumes.
inline TriangleMesh tessellate_volume_boundary(const SplineVolume& v, int n) {
  TriangleMesh m;
  for (int f = 0; f < 6; ++f) m.append(tessellate_surface(boundary_face(v, f), n));
  return m;
}

/// Closed tube around every strut: `sides`-gon prisms with end caps.
inline TriangleMesh tessellate_beams(const BeamGraph& g, int sides = 8) {
  if (sides < 3) throw ParameterError("tube tessellation needs at least 3 sides");
  TriangleMesh m;
  for (const auto& e : g.edges) {
    const Vec3 a = g.nodes[std::size_t(e.a)], b = g.nodes[std::size_t(e.b)];
    const Vec3 d = (b - a).normalized();
    const Vec3 ref = std::abs(d.z()) < 0.9 ? Vec3::UnitZ() : Vec3::UnitX();
    const Vec3 p = d.cross(ref).normalized(), q = d.cross(p);
    const int base = int(m.vertices.size());
    for (int end = 0; end < 2; ++end)
      for (int k = 0; k < sides; ++k) {
        const double t = 2 * kPi * k / sides;
        m.vertices.push_back((end ? b : a) + e.radius * (std::cos(t) * p + std::sin(t) * q));
      }
    const int ca = int(m.vertices.size());
    m.vertices.push_back(a);
    m.vertices.push_back(b);
    for (int k = 0; k < sides; ++k) {
      const int k1 = (k + 1) % sides;
      m.triangles.push_back({base + k, base + sides + k1, base + sides + k});
      m.triangles.push_back({base + k, base + k1, base + sides + k1});
      m.triangles.push_back({ca, base + k1, base + k});
      m.triangles.push_back({ca + 1, base + sides + k, base + sides + k1});
    }
  }
  return m;
}

}  // namespace glat
