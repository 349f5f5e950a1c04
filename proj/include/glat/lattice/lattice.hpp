#pragma once

#include "glat/beam/model.hpp"
#include "glat/core/error.hpp"
#include "glat/core/parallel.hpp"
#include "glat/lattice/grading.hpp"
#include "glat/lattice/hex_mesh.hpp"
#include "glat/lattice/merge.hpp"
#include "glat/spline/compose.hpp"
#include "glat/spline/geometry.hpp"
#include "glat/tiles/tile.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace glat {

struct LatticeOptions {
  std::array<int, 3> grid{1, 1, 1};
  TileSpec tile;
  std::optional<Grading> grading;  // thickness for solid tiles, radius for beam cells
  bool compose_solids = true;      // false: only the reduced beam graph is built
  ComposeOptions compose;
  int up_axis = 2;                 // macro parametric axis receiving the cell-local z axis
  double weld_tolerance = 0.0;     // <= 0 selects 1e-6 * macro bbox diagonal
};

struct LatticeCell {
  std::array<int, 3> index{};
  SolidTile local;                     // unit-cube tile as generated for this cell
  std::vector<SplineVolume> composed;  // one per piece, world coordinates
};

/// How a merged strut's radius follows the grading: r = radius_scale * g(grading_param).
struct StrutInfo {
  Vec3 grading_param = Vec3::Zero();
  double radius_scale = 1.0;
};

struct LatticeModel {
  SplineVolume macro;
  std::array<int, 3> grid{1, 1, 1};
  TileSpec tile;
  Grading grading;
  int up_axis = 2;
  double weld_tolerance = 0.0;
  std::vector<LatticeCell> cells;  // solid tiles only
  double max_compose_deviation = 0.0;
  int compose_grid = 0;

  BeamGraph beams;                // merged, world coordinates
  std::vector<Vec3> node_params;  // macro parameters of the beam nodes
  std::vector<StrutInfo> struts;  // per beam edge
  std::vector<std::pair<int, int>> dropped_edges;
  int pruned_nodes = 0;  // beam-cell fragments cut loose by the lattice boundary

  bool solid() const { return tile.kind != TileKind::AuxeticDoubleV; }
};

namespace detail {

inline double grid_param(const SplineVolume& macro, int dir, int n, double i) {
  auto [a, b] = macro.domain(dir);
  return a + (b - a) * (i / double(n));
}

/// Macro axis receiving cell-local axis L (cyclic, orientation preserving).
inline int macro_axis(int up_axis, int local) { return (up_axis + 1 + local) % 3; }

/// Area of the world image of a unit cell-local section perpendicular to d.
inline double section_area_factor(const Mat3& m, const Vec3& d) {
  return std::abs(m.determinant()) * (m.inverse().transpose() * d.normalized()).norm();
}

/// Removes every node and edge outside the largest connected component.
/// Returns the number of removed nodes.
inline int keep_largest_component(BeamGraph& g, std::vector<Vec3>& params, std::vector<StrutInfo>& struts) {
  const int n = int(g.nodes.size());
  std::vector<int> parent(n);
  for (int i = 0; i < n; ++i) parent[i] = i;
  auto find = [&](int i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (const auto& e : g.edges) parent[find(e.a)] = find(e.b);
  std::vector<int> size(n, 0);
  for (int i = 0; i < n; ++i) ++size[find(i)];
  const int root = int(std::max_element(size.begin(), size.end()) - size.begin());
  if (n == 0 || size[root] == n) return 0;

  std::vector<int> remap(n, -1);
  BeamGraph out;
  std::vector<Vec3> out_params;
  for (int i = 0; i < n; ++i)
    if (find(i) == root) {
      remap[i] = out.add_node(g.nodes[i]);
      out_params.push_back(params[i]);
    }
  std::vector<StrutInfo> out_struts;
  for (std::size_t e = 0; e < g.edges.size(); ++e)
    if (remap[g.edges[e].a] >= 0) {
      out.add_edge(remap[g.edges[e].a], remap[g.edges[e].b], g.edges[e].radius);
      out_struts.push_back(struts[e]);
    }
  const int removed = n - size[root];
  g = std::move(out);
  params = std::move(out_params);
  struts = std::move(out_struts);
  return removed;
}

}  // namespace detail

/// Populates the macro parameter box with tiles. Solid tiles are mapped into
/// their cell's parameter box and composed with the macro; their strut axes are
/// also reduced to a welded beam graph with equal-area circular sections. Beam
/// cells are embedded in the hex cells by the trilinear corner map and welded.
inline LatticeModel build_lattice(const SplineVolume& macro, const LatticeOptions& opt) {
  for (int n : opt.grid)
    if (n < 1) throw ParameterError("lattice grid must be at least 1 per direction");
  if (opt.up_axis < 0 || opt.up_axis > 2) throw ParameterError("up_axis must be 0, 1 or 2");
  opt.tile.validate();

  LatticeModel lat;
  lat.macro = macro;
  lat.grid = opt.grid;
  lat.tile = opt.tile;
  lat.up_axis = opt.up_axis;
  const bool solid = lat.solid();
  const GradedQuantity want = solid ? GradedQuantity::Thickness : GradedQuantity::Radius;
  if (opt.grading) {
    if (opt.grading->quantity() != want)
      throw ParameterError(solid ? "solid tiles are graded by thickness" : "beam cells are graded by radius");
    lat.grading = *opt.grading;
  } else {
    lat.grading = Grading::uniform(solid ? opt.tile.arm_thickness : opt.tile.strut_radius, want);
  }
  const Grading& grading = lat.grading;
  const double diag = macro.control_bounds().diagonal();
  lat.weld_tolerance = opt.weld_tolerance > 0 ? opt.weld_tolerance : 1e-6 * diag;

  const auto& g = opt.grid;
  auto cell_param = [&](const std::array<int, 3>& idx, const Vec3& local, int up) {
    Vec3 t;
    for (int l = 0; l < 3; ++l) {
      const int d = up < 0 ? l : detail::macro_axis(up, l);
      t[d] = detail::grid_param(macro, d, g[d], idx[d] + local[l]);
    }
    return t;
  };

  std::vector<std::array<int, 3>> cells;
  for (int k = 0; k < g[2]; ++k)
    for (int j = 0; j < g[1]; ++j)
      for (int i = 0; i < g[0]; ++i) {
        cells.push_back({i, j, k});
        const Vec3 c = cell_param({i, j, k}, Vec3::Constant(0.5), -1);
        if (!(macro.jacobian({c[0], c[1], c[2]}).determinant() > 0))
          throw DegeneracyError("macro Jacobian is not positive at the centre of cell (" + std::to_string(i) + "," +
                                std::to_string(j) + "," + std::to_string(k) + ")");
      }

  std::vector<BeamGraph> graphs(cells.size());
  std::vector<std::vector<StrutInfo>> infos(cells.size());
  std::vector<std::vector<Vec3>> params(cells.size());

  if (solid) {
    lat.cells.resize(cells.size());
    std::vector<std::string> errors(cells.size());
    parallel_for(cells.size(), [&](std::size_t ci) {
      const auto idx = cells[ci];
      TileSpec spec = opt.tile;
      for (int f = 0; f < 6; ++f) {
        const int a = face_axis(f);
        const bool boundary = face_side(f) ? idx[a] == g[a] - 1 : idx[a] == 0;
        if (!boundary) spec.attach_faces.reset(f);
      }
      spec.arm_thickness = grading(cell_param(idx, Vec3::Constant(0.5), -1));
      FaceThickness ft;
      for (int f = 0; f < 6; ++f) ft[f] = grading(cell_param(idx, face_center(f), -1));
      try {
        spec.validate();
        auto& cell = lat.cells[ci];
        cell.index = idx;
        cell.local = spec.kind == TileKind::CrossAxis ? make_cross_tile(spec, ft) : make_diagonal_tile(spec, ft);
      } catch (const Error& e) {
        errors[ci] = e.what();
      }
    });
    for (const auto& e : errors)
      if (!e.empty()) throw ParameterError("grading gives an invalid tile: " + e);

    // Strut axes -> beam graph with equal-area radii.
    for (std::size_t ci = 0; ci < cells.size(); ++ci) {
      const auto& cell = lat.cells[ci];
      std::map<std::array<double, 3>, int> ids;
      auto node = [&](const Vec3& local) {
        const Vec3 t = cell_param(cell.index, local, -1);
        auto [it, fresh] = ids.emplace(std::array<double, 3>{t.x(), t.y(), t.z()}, int(graphs[ci].nodes.size()));
        if (fresh) {
          graphs[ci].add_node(macro(t.x(), t.y(), t.z()));
          params[ci].push_back(t);
        }
        return it->second;
      };
      Mat3 cellsize = Mat3::Zero();
      for (int d = 0; d < 3; ++d)
        cellsize(d, d) = detail::grid_param(macro, d, g[d], 1.0) - detail::grid_param(macro, d, g[d], 0.0);
      for (const auto& cl : cell.local.centerlines) {
        const Vec3 gp = cell_param(cell.index, cl.face >= 0 ? face_center(cl.face) : Vec3::Constant(0.5), -1);
        for (std::size_t s = 0; s + 1 < cl.points.size(); ++s) {
          const Vec3 mid = cell_param(cell.index, 0.5 * (cl.points[s] + cl.points[s + 1]), -1);
          const Mat3 m = macro.jacobian({mid[0], mid[1], mid[2]}) * cellsize;
          const double scale = std::sqrt(detail::section_area_factor(m, cl.points[s + 1] - cl.points[s]) / kPi);
          const double t = grading(gp);
          graphs[ci].add_edge(node(cl.points[s]), node(cl.points[s + 1]), scale * t);
          infos[ci].push_back({gp, scale});
        }
      }
    }
  } else {
    BeamGraph unit = make_auxetic_cell(opt.tile);
    for (std::size_t ci = 0; ci < cells.size(); ++ci) {
      const auto idx = cells[ci];
      std::array<Vec3, 8> corners;
      for (int k = 0; k < 8; ++k) {
        const Vec3 t = cell_param(idx, Vec3(k & 1, (k >> 1) & 1, (k >> 2) & 1), opt.up_axis);
        corners[k] = macro(t.x(), t.y(), t.z());
      }
      BeamGraph emb = embed_beam_cell(corners, unit);
      for (const auto& p : unit.nodes) params[ci].push_back(cell_param(idx, p, opt.up_axis));
      for (auto& e : emb.edges) {
        const Vec3 mid = cell_param(idx, 0.5 * (unit.nodes[e.a] + unit.nodes[e.b]), opt.up_axis);
        e.radius = grading(mid);
        infos[ci].push_back({mid, 1.0});
      }
      graphs[ci] = std::move(emb);
    }
  }

  for (const auto& gr : graphs)
    for (const auto& e : gr.edges)
      if (!(e.radius > 0)) throw ParameterError("grading produces a non-positive strut radius");

  auto merged = merge_graphs(graphs, lat.weld_tolerance);
  lat.beams = std::move(merged.graph);
  lat.dropped_edges = std::move(merged.dropped_edges);
  lat.node_params.assign(lat.beams.nodes.size(), Vec3::Zero());
  std::vector<int> count(lat.beams.nodes.size(), 0);
  for (std::size_t ci = 0; ci < graphs.size(); ++ci)
    for (std::size_t i = 0; i < graphs[ci].nodes.size(); ++i) {
      const int m = merged.node_map[ci][i];
      lat.node_params[m] += params[ci][i];
      ++count[m];
    }
  for (std::size_t i = 0; i < count.size(); ++i) lat.node_params[i] /= count[i];
  for (auto [gi, ei] : merged.edge_source) lat.struts.push_back(infos[gi][ei]);
  if (!solid) lat.pruned_nodes = detail::keep_largest_component(lat.beams, lat.node_params, lat.struts);

  if (solid && opt.compose_solids) {
    // Compose every piece; pieces meeting across a cell face must share the
    // fit grid, so all pieces are brought to the largest grid any one needed.
    struct Job {
      std::size_t cell, piece;
    };
    std::vector<Job> jobs;
    for (std::size_t ci = 0; ci < lat.cells.size(); ++ci) {
      lat.cells[ci].composed.resize(lat.cells[ci].local.pieces.size());
      for (std::size_t p = 0; p < lat.cells[ci].local.pieces.size(); ++p) jobs.push_back({ci, p});
    }
    auto param_piece = [&](const Job& j) {
      const auto& cell = lat.cells[j.cell];
      return cell.local.pieces[j.piece].volume.transformed(
          [&](const Vec3& p) { return cell_param(cell.index, p, -1); });
    };
    std::vector<ComposeResult> results(jobs.size());
    auto run = [&](const ComposeOptions& co, const std::vector<std::size_t>& which) {
      for (std::size_t w : which) results[w] = compose(macro, param_piece(jobs[w]), co);
    };
    std::vector<std::size_t> all(jobs.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    run(opt.compose, all);
    int nmax = 0;
    for (const auto& r : results) nmax = std::max(nmax, r.grid);
    std::vector<std::size_t> redo;
    for (std::size_t i = 0; i < results.size(); ++i)
      if (results[i].grid != nmax) redo.push_back(i);
    ComposeOptions fixed = opt.compose;
    fixed.grid = fixed.max_grid = nmax;
    run(fixed, redo);
    lat.compose_grid = nmax;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
      lat.max_compose_deviation = std::max(lat.max_compose_deviation, results[i].max_deviation);
      lat.cells[jobs[i].cell].composed[jobs[i].piece] = std::move(results[i].volume);
    }
  }
  return lat;
}

/// Continuity across shared cell faces of a composed solid lattice.
struct InterfaceGaps {
  int faces_checked = 0;
  double max_position_gap = 0.0;  // world distance between matching boundary samples
  double max_angle_gap = 0.0;     // rad, between the arm axes on both sides
};

inline InterfaceGaps measure_interface_gaps(const LatticeModel& lat, int samples = 9) {
  InterfaceGaps out;
  if (!lat.solid()) throw ParameterError("interface gaps apply to solid lattices");
  auto cell_at = [&](const std::array<int, 3>& idx) -> const LatticeCell& {
    return lat.cells[std::size_t(idx[0] + lat.grid[0] * (idx[1] + lat.grid[1] * idx[2]))];
  };
  struct Sample {
    Eigen::Vector2d key;
    Vec3 x, outward;
  };
  auto face_samples = [&](const LatticeCell& cell, int face) {
    std::vector<Sample> s;
    for (std::size_t p = 0; p < cell.local.pieces.size(); ++p) {
      const auto& piece = cell.local.pieces[p];
      if (piece.role != PieceRole::Arm || piece.face != face) continue;
      for (int dir = 0; dir < 3; ++dir)
        for (int side = 0; side < 2; ++side) {
          if (detail::boundary_on_cube_face(piece.volume, dir, side) != face) continue;
          const auto& vol = cell.composed[p];
          const int a = face_axis(face), b = (a + 1) % 3, c = (a + 2) % 3;
          for (int i = 0; i < samples; ++i)
            for (int j = 0; j < samples; ++j) {
              SplineVolume::Param t{};
              t[dir] = side ? 1.0 : 0.0;
              t[(dir + 1) % 3] = i / double(samples - 1);
              t[(dir + 2) % 3] = j / double(samples - 1);
              const Vec3 loc = piece.volume.eval(t);
              Vec3 x;
              SplineVolume::Jacobian jac;
              vol.eval_with_jacobian(t, x, jac);
              s.push_back({Eigen::Vector2d(loc[b], loc[c]), x, (side ? 1.0 : -1.0) * Vec3(jac.col(dir))});
            }
        }
    }
    return s;
  };
  for (const auto& cell : lat.cells)
    for (int a = 0; a < 3; ++a) {
      auto nidx = cell.index;
      if (++nidx[a] >= lat.grid[a]) continue;
      const auto sa = face_samples(cell, 2 * a + 1);
      const auto sb = face_samples(cell_at(nidx), 2 * a);
      if (sa.empty() || sb.empty()) continue;
      ++out.faces_checked;
      for (const auto& p : sa) {
        const Sample* match = nullptr;
        for (const auto& q : sb)
          if ((q.key - p.key).norm() < 1e-9) match = &q;
        if (!match) {
          out.max_position_gap = std::numeric_limits<double>::infinity();
          continue;
        }
        out.max_position_gap = std::max(out.max_position_gap, (p.x - match->x).norm());
        const double cosang = std::clamp(-p.outward.normalized().dot(match->outward.normalized()), -1.0, 1.0);
        const double ang = std::atan2(p.outward.normalized().cross(-match->outward.normalized()).norm(), cosang);
        out.max_angle_gap = std::max(out.max_angle_gap, ang);
      }
    }
  return out;
}

/// Beam model extracted from a lattice, with each strut split into equal elements.
struct BeamLattice {
  BeamModel model;
  std::vector<Vec3> node_params;
  std::vector<int> element_strut;  // merged strut (beam edge) index of each element
};

inline BeamLattice extract_beam_model(const LatticeModel& lat, int elements_per_strut, const Material& mat = {}) {
  if (elements_per_strut < 1) throw ParameterError("elements_per_strut must be at least 1");
  if (lat.beams.edges.empty()) throw ParameterError("lattice has no struts to analyse");
  BeamLattice out;
  out.model.nodes = lat.beams.nodes;
  out.node_params = lat.node_params;
  for (std::size_t e = 0; e < lat.beams.edges.size(); ++e) {
    const auto& ed = lat.beams.edges[e];
    int prev = ed.a;
    for (int k = 1; k <= elements_per_strut; ++k) {
      int next = ed.b;
      if (k < elements_per_strut) {
        const double s = double(k) / elements_per_strut;
        next = out.model.add_node((1 - s) * lat.beams.nodes[ed.a] + s * lat.beams.nodes[ed.b]);
        out.node_params.push_back((1 - s) * lat.node_params[ed.a] + s * lat.node_params[ed.b]);
      }
      out.model.add_element(prev, next, ed.radius, mat);
      out.element_strut.push_back(int(e));
      prev = next;
    }
  }
  return out;
}

}  // namespace glat
