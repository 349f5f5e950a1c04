#pragma once

#include "glat/core/error.hpp"
#include "glat/core/types.hpp"
#include "glat/spline/tensor_spline.hpp"
#include "glat/tiles/beam_graph.hpp"

#include <array>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

namespace glat {

/// Hexahedral mesh; cell corners follow the VTK hexahedron order
/// (bottom face counter-clockwise, then top face).
struct HexMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 8>> cells;

  /// Corners of a cell in unit-cube order (index ix + 2 iy + 4 iz).
  std::array<Vec3, 8> cube_corners(std::size_t cell) const {
    static constexpr int vtk_of_cube[8] = {0, 1, 3, 2, 4, 5, 7, 6};
    std::array<Vec3, 8> out;
    for (int k = 0; k < 8; ++k) out[k] = vertices[cells[cell][vtk_of_cube[k]]];
    return out;
  }
};

/// Trilinear interpolant of 8 corners (index ix + 2 iy + 4 iz) at p in [0,1]^3.
inline Vec3 trilinear(const std::array<Vec3, 8>& c, const Vec3& p) {
  Vec3 x = Vec3::Zero();
  for (int k = 0; k < 8; ++k) {
    const double wx = (k & 1) ? p.x() : 1.0 - p.x();
    const double wy = (k & 2) ? p.y() : 1.0 - p.y();
    const double wz = (k & 4) ? p.z() : 1.0 - p.z();
    x += (wx * wy * wz) * c[k];
  }
  return x;
}

inline Mat3 trilinear_jacobian(const std::array<Vec3, 8>& c, const Vec3& p) {
  Mat3 j = Mat3::Zero();
  for (int k = 0; k < 8; ++k) {
    const int b[3] = {k & 1, (k >> 1) & 1, (k >> 2) & 1};
    for (int d = 0; d < 3; ++d) {
      double w = 1.0;
      for (int e = 0; e < 3; ++e) {
        if (e == d) w *= b[e] ? 1.0 : -1.0;
        else w *= b[e] ? p[e] : 1.0 - p[e];
      }
      j.col(d) += w * c[k];
    }
  }
  return j;
}

/// Uniform parametric hex grid of a macro volume. Cells are positively oriented
/// when the macro is; an inverted cell is a DegeneracyError.
inline HexMesh hex_mesh(const SplineVolume& macro, std::array<int, 3> res) {
  for (int r : res)
    if (r < 1) throw ParameterError("hex mesh resolution must be at least 1 per direction");
  HexMesh mesh;
  std::array<std::vector<double>, 3> t;
  for (int d = 0; d < 3; ++d) {
    auto [a, b] = macro.domain(d);
    for (int i = 0; i <= res[d]; ++i) t[d].push_back(i == res[d] ? b : a + (b - a) * double(i) / res[d]);
  }
  auto vid = [&](int i, int j, int k) { return i + (res[0] + 1) * (j + (res[1] + 1) * k); };
  mesh.vertices.resize(std::size_t(res[0] + 1) * (res[1] + 1) * (res[2] + 1));
  for (int k = 0; k <= res[2]; ++k)
    for (int j = 0; j <= res[1]; ++j)
      for (int i = 0; i <= res[0]; ++i) mesh.vertices[vid(i, j, k)] = macro(t[0][i], t[1][j], t[2][k]);

  for (int k = 0; k < res[2]; ++k)
    for (int j = 0; j < res[1]; ++j)
      for (int i = 0; i < res[0]; ++i) {
        mesh.cells.push_back({vid(i, j, k), vid(i + 1, j, k), vid(i + 1, j + 1, k), vid(i, j + 1, k),
                              vid(i, j, k + 1), vid(i + 1, j, k + 1), vid(i + 1, j + 1, k + 1), vid(i, j + 1, k + 1)});
        const SplineVolume::Param mid{0.5 * (t[0][i] + t[0][i + 1]), 0.5 * (t[1][j] + t[1][j + 1]),
                                      0.5 * (t[2][k] + t[2][k + 1])};
        const double det = trilinear_jacobian(mesh.cube_corners(mesh.cells.size() - 1), Vec3::Constant(0.5)).determinant();
        if (!(det > 0) || !(macro.jacobian(mid).determinant() > 0))
          throw DegeneracyError("inverted hex cell (" + std::to_string(i) + "," + std::to_string(j) + "," +
                                std::to_string(k) + ")");
      }
  return mesh;
}

/// Maps a unit-cube beam cell into a hexahedron by the trilinear corner map.
inline BeamGraph embed_beam_cell(const std::array<Vec3, 8>& corners, const BeamGraph& cell) {
  for (const Vec3& p : {Vec3(0.5, 0.5, 0.5), Vec3(0, 0, 0), Vec3(1, 1, 1)})
    if (!(std::abs(trilinear_jacobian(corners, p).determinant()) > 0))
      throw DegeneracyError("degenerate hex cell in beam embedding");
  BeamGraph out = cell;
  for (auto& n : out.nodes) n = trilinear(corners, n);
  return out;
}

/// Legacy ASCII unstructured grid with hexahedra (cell type 12).
inline void write_vtk_hex(std::ostream& os, const HexMesh& mesh, const std::string& title = "glat hex mesh") {
  os << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  os << "POINTS " << mesh.vertices.size() << " double\n";
  for (const auto& v : mesh.vertices)
    os << format_double(v.x()) << ' ' << format_double(v.y()) << ' ' << format_double(v.z()) << '\n';
  os << "CELLS " << mesh.cells.size() << ' ' << mesh.cells.size() * 9 << '\n';
  for (const auto& c : mesh.cells) {
    os << 8;
    for (int v : c) os << ' ' << v;
    os << '\n';
  }
  os << "CELL_TYPES " << mesh.cells.size() << '\n';
  for (std::size_t i = 0; i < mesh.cells.size(); ++i) os << "12\n";
}

inline void write_vtk_hex_file(const std::string& path, const HexMesh& mesh) {
  std::ofstream os(path);
  if (!os) throw ParameterError("cannot write " + path);
  write_vtk_hex(os, mesh);
}

}  // namespace glat
