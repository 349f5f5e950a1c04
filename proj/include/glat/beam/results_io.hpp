#pragma once

#include "glat/beam/model.hpp"
#include "glat/beam/static_solver.hpp"
#include "glat/core/types.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>
#include <string>

namespace glat {

/// Legacy ASCII unstructured grid of line cells (type 3). With a result, adds
/// point data: displacement vectors and the largest von Mises estimate of the
/// incident elements; and cell data: radius, axial stress, von Mises.
inline void write_vtk_beams(std::ostream& os, const BeamModel& m, const SolveResult* res = nullptr) {
  os << "# vtk DataFile Version 3.0\nglat beam model\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  os << "POINTS " << m.nodes.size() << " double\n";
  for (const auto& p : m.nodes) os << format_double(p.x()) << ' ' << format_double(p.y()) << ' ' << format_double(p.z()) << '\n';
  os << "CELLS " << m.elements.size() << ' ' << 3 * m.elements.size() << '\n';
  for (const auto& e : m.elements) os << "2 " << e.a << ' ' << e.b << '\n';
  os << "CELL_TYPES " << m.elements.size() << '\n';
  for (std::size_t i = 0; i < m.elements.size(); ++i) os << "3\n";

  os << "CELL_DATA " << m.elements.size() << "\nSCALARS radius double 1\nLOOKUP_TABLE default\n";
  for (const auto& e : m.elements) os << format_double(e.radius) << '\n';
  if (!res) return;
  os << "SCALARS axial_stress double 1\nLOOKUP_TABLE default\n";
  for (double s : res->axial_stress) os << format_double(s) << '\n';
  os << "SCALARS von_mises double 1\nLOOKUP_TABLE default\n";
  for (double s : res->von_mises) os << format_double(s) << '\n';

  std::vector<double> nodal(m.nodes.size(), 0.0);
  for (std::size_t e = 0; e < m.elements.size(); ++e)
    for (int n : {m.elements[e].a, m.elements[e].b}) nodal[n] = std::max(nodal[n], res->von_mises[e]);
  os << "POINT_DATA " << m.nodes.size() << "\nVECTORS displacement double\n";
  for (std::size_t i = 0; i < m.nodes.size(); ++i) {
    const Vec3 d = res->displacement(int(i));
    os << format_double(d.x()) << ' ' << format_double(d.y()) << ' ' << format_double(d.z()) << '\n';
  }
  os << "SCALARS von_mises double 1\nLOOKUP_TABLE default\n";
  for (double s : nodal) os << format_double(s) << '\n';
}

inline void write_vtk_beams_file(const std::string& path, const BeamModel& m, const SolveResult* res = nullptr) {
  std::ofstream os(path);
  if (!os) throw ParameterError("cannot write " + path);
  write_vtk_beams(os, m, res);
}

}  // namespace glat
