#pragma once

#include "glat/beam/static_solver.hpp"

#include <cmath>
#include <vector>

namespace glat {

struct PoissonResult {
  double nu = 0.0;
  double axial_strain = 0.0;
  std::array<double, 3> strain{};  // mean normal strain per axis from face-node displacements
};

/// Effective Poisson ratio of a box-shaped beam patch: the faces normal to
/// `axis` get prescribed axial displacements (strain * length), lateral faces
/// are free, and three point constraints remove the remaining rigid motion.
/// nu = -mean(lateral strains) / axial strain.
inline PoissonResult effective_poisson(const BeamModel& patch, int axis, double strain, double face_tol_rel = 1e-9) {
  if (strain == 0.0) throw ParameterError("effective Poisson ratio is undefined for zero applied strain");
  if (axis < 0 || axis > 2) throw ParameterError("axis must be 0, 1 or 2");
  BeamModel m = patch;
  m.clamped.clear();
  const Aabb box = m.bounds();
  const Vec3 size = box.hi - box.lo;
  const double tol = face_tol_rel * size.norm();
  const int b = (axis + 1) % 3, c = (axis + 2) % 3;
  if (!(size[axis] > 0 && size[b] > 0 && size[c] > 0)) throw ParameterError("patch must have positive extent");

  auto on = [&](int node, int dir, int side) {
    const double v = m.nodes[node][dir];
    return side ? v >= box.hi[dir] - tol : v <= box.lo[dir] + tol;
  };
  std::vector<PrescribedDof> pre;
  int anchor = -1, second = -1;
  const Vec3 mid = 0.5 * (box.lo + box.hi);
  for (int i = 0; i < int(m.nodes.size()); ++i) {
    if (on(i, axis, 0)) {
      pre.push_back({6 * i + axis, 0.0});
      if (anchor < 0 || (m.nodes[i] - mid).squaredNorm() < (m.nodes[anchor] - mid).squaredNorm()) anchor = i;
    } else if (on(i, axis, 1)) {
      pre.push_back({6 * i + axis, strain * size[axis]});
    }
  }
  if (anchor < 0) throw ParameterError("no nodes on the loaded faces");
  for (int i = 0; i < int(m.nodes.size()); ++i)
    if (on(i, axis, 0) && i != anchor) {
      const double d = std::abs(m.nodes[i][b] - m.nodes[anchor][b]);
      if (second < 0 || d > std::abs(m.nodes[second][b] - m.nodes[anchor][b])) second = i;
    }
  if (second < 0 || std::abs(m.nodes[second][b] - m.nodes[anchor][b]) <= tol)
    throw ParameterError("loaded face too small to remove rigid rotation");
  pre.push_back({6 * anchor + b, 0.0});
  pre.push_back({6 * anchor + c, 0.0});
  pre.push_back({6 * second + c, 0.0});

  const auto res = solve_static(m, Eigen::VectorXd::Zero(Eigen::Index(m.dof_count())), SolveOptions{}, pre);

  PoissonResult out;
  for (int d = 0; d < 3; ++d) {
    double s0 = 0, s1 = 0;
    int n0 = 0, n1 = 0;
    for (int i = 0; i < int(m.nodes.size()); ++i) {
      if (on(i, d, 0)) {
        s0 += res.u[6 * i + d];
        ++n0;
      }
      if (on(i, d, 1)) {
        s1 += res.u[6 * i + d];
        ++n1;
      }
    }
    if (n0 == 0 || n1 == 0) throw ParameterError("patch has no nodes on a bounding face");
    out.strain[d] = (s1 / n1 - s0 / n0) / size[d];
  }
  out.axial_strain = out.strain[axis];
  out.nu = -0.5 * (out.strain[b] + out.strain[c]) / out.axial_strain;
  return out;
}

}  // namespace glat
