#pragma once

#include "glat/beam/assembly.hpp"
#include "glat/beam/element.hpp"
#include "glat/beam/model.hpp"
#include "glat/core/error.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

namespace glat {

struct PrescribedDof {
  int dof = 0;  // 6 * node + component
  double value = 0.0;
};

struct SolveOptions {
  bool shear_rigid = false;
  std::size_t direct_limit = 200000;  // free DOFs; larger systems use preconditioned CG
  double tolerance = 1e-8;            // relative residual
};

struct SolveResult {
  Eigen::VectorXd u;          // 6 per node
  Eigen::VectorXd reactions;  // K u - f on constrained DOFs, zero elsewhere
  double compliance = 0.0;    // f . u
  double max_deflection = 0.0;
  int max_deflection_node = -1;
  double residual = 0.0;
  std::vector<double> axial_stress;  // per element, Pa, tension positive
  std::vector<double> von_mises;     // per element estimate, Pa
  std::string solver;
  std::vector<std::string> warnings;

  Vec3 displacement(int node) const { return u.segment<3>(6 * node); }
};

namespace detail {

/// Throws if some connected part of the frame has no constrained node.
inline void check_supported(const BeamModel& m, const std::vector<char>& constrained_node) {
  std::vector<int> parent(m.nodes.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (const auto& e : m.elements) parent[find(e.a)] = find(e.b);
  std::vector<char> ok(m.nodes.size(), 0);
  for (std::size_t i = 0; i < m.nodes.size(); ++i)
    if (constrained_node[i]) ok[find(int(i))] = 1;
  std::vector<int> size(m.nodes.size(), 0);
  for (std::size_t i = 0; i < m.nodes.size(); ++i) ++size[find(int(i))];
  for (std::size_t i = 0; i < m.nodes.size(); ++i)
    if (!ok[find(int(i))])
      throw NumericalError("singular stiffness: floating substructure of " + std::to_string(size[find(int(i))]) +
                           " node(s) containing node " + std::to_string(i) + " has no clamped node");
}

}  // namespace detail

/// End forces of an element in its local frame (12 entries).
inline Vec12 element_end_forces(const BeamModel& m, const BeamElement& e, const Eigen::VectorXd& u,
                                bool shear_rigid = false) {
  const Vec3 a = m.nodes[e.a], b = m.nodes[e.b];
  Vec12 ue;
  ue << u.segment<6>(6 * e.a), u.segment<6>(6 * e.b);
  const Mat3 R = element_frame(a, b);
  Mat12 kl;
  local_stiffness(e.radius, (b - a).norm(), e.material, shear_rigid, kl);
  return kl * (frame_transform(R) * ue);
}

/// Linear static solve K u = f with clamped nodes and optional prescribed DOFs.
inline SolveResult solve_static(const BeamModel& m, const Eigen::VectorXd& f, const SolveOptions& opt = {},
                                const std::vector<PrescribedDof>& prescribed = {}) {
  m.validate();
  const std::size_t n = m.dof_count();
  if (std::size_t(f.size()) != n) throw ParameterError("load vector size does not match the model");

  std::vector<char> fixed(n, 0), node_fixed(m.nodes.size(), 0);
  Eigen::VectorXd up = Eigen::VectorXd::Zero(Eigen::Index(n));
  for (std::size_t i = 0; i < m.nodes.size(); ++i)
    if (m.is_clamped(int(i))) {
      node_fixed[i] = 1;
      for (int c = 0; c < 6; ++c) fixed[6 * i + c] = 1;
    }
  for (const auto& p : prescribed) {
    if (p.dof < 0 || std::size_t(p.dof) >= n) throw ParameterError("prescribed DOF out of range");
    fixed[p.dof] = 1;
    up[p.dof] = p.value;
    node_fixed[p.dof / 6] = 1;
  }
  if (std::none_of(fixed.begin(), fixed.end(), [](char c) { return c; }))
    throw NumericalError("singular stiffness: no clamped nodes");
  detail::check_supported(m, node_fixed);

  std::vector<int> free_of(n, -1);
  int nf = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (!fixed[i]) free_of[i] = nf++;

  const auto ke = element_matrices(m, opt.shear_rigid);
  const SparseMat K = assemble_global(m, ke);
  const Eigen::VectorXd kup = K * up;

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(std::size_t(K.nonZeros()));
  for (int c = 0; c < K.outerSize(); ++c)
    for (SparseMat::InnerIterator it(K, c); it; ++it) {
      const int r = free_of[it.row()], cc = free_of[it.col()];
      if (r >= 0 && cc >= 0) trip.emplace_back(r, cc, it.value());
    }
  SparseMat Kff(nf, nf);
  Kff.setFromTriplets(trip.begin(), trip.end());
  Eigen::VectorXd rhs(nf);
  for (std::size_t i = 0; i < n; ++i)
    if (free_of[i] >= 0) rhs[free_of[i]] = f[Eigen::Index(i)] - kup[Eigen::Index(i)];

  SolveResult res;
  Eigen::VectorXd uf = Eigen::VectorXd::Zero(nf);
  const double scale = std::max(rhs.norm(), 1e-300);
  if (rhs.norm() > 0) {
    if (std::size_t(nf) <= opt.direct_limit) {
      res.solver = "sparse LDLT";
      Eigen::SimplicialLDLT<SparseMat> ldlt(Kff);
      if (ldlt.info() != Eigen::Success) throw NumericalError("LDLT factorisation failed (singular stiffness)");
      const auto& d = ldlt.vectorD();
      const double dmax = d.cwiseAbs().maxCoeff();
      for (Eigen::Index i = 0; i < d.size(); ++i)
        if (!(d[i] > 1e-14 * dmax)) throw NumericalError("singular stiffness: non-positive pivot in LDLT");
      uf = ldlt.solve(rhs);
      Eigen::VectorXd r = rhs - Kff * uf;
      for (int it = 0; it < 3 && r.norm() > opt.tolerance * scale; ++it) {
        uf += ldlt.solve(r);
        r = rhs - Kff * uf;
      }
    } else {
      res.solver = "CG + incomplete Cholesky";
      Eigen::ConjugateGradient<SparseMat, Eigen::Lower | Eigen::Upper, Eigen::IncompleteCholesky<double>> cg;
      cg.setTolerance(0.1 * opt.tolerance);
      cg.setMaxIterations(std::max(1000, 10 * nf));
      cg.compute(Kff);
      uf = cg.solve(rhs);
      if (cg.info() != Eigen::Success)
        throw NumericalError("conjugate gradient did not converge after " + std::to_string(cg.iterations()) +
                             " iterations (error " + std::to_string(cg.error()) + ")");
    }
    res.residual = (rhs - Kff * uf).norm() / scale;
    if (!(res.residual <= opt.tolerance))
      throw NumericalError("static solve residual " + std::to_string(res.residual) + " above tolerance");
  } else {
    res.solver = "trivial";
  }

  res.u = up;
  for (std::size_t i = 0; i < n; ++i)
    if (free_of[i] >= 0) res.u[Eigen::Index(i)] = uf[free_of[i]];
  const Eigen::VectorXd ku = K * res.u;
  res.reactions = Eigen::VectorXd::Zero(Eigen::Index(n));
  for (std::size_t i = 0; i < n; ++i)
    if (fixed[i]) res.reactions[Eigen::Index(i)] = ku[Eigen::Index(i)] - f[Eigen::Index(i)];
  res.compliance = f.dot(res.u);

  for (std::size_t i = 0; i < m.nodes.size(); ++i) {
    const double d = res.u.segment<3>(6 * i).norm();
    if (d > res.max_deflection || res.max_deflection_node < 0) {
      res.max_deflection = d;
      res.max_deflection_node = int(i);
    }
  }

  res.axial_stress.resize(m.elements.size());
  res.von_mises.resize(m.elements.size());
  for (std::size_t e = 0; e < m.elements.size(); ++e) {
    const auto& el = m.elements[e];
    const Vec12 fe = element_end_forces(m, el, res.u, opt.shear_rigid);
    const auto sec = circular_section(el.radius);
    const double N = fe[6];
    double moment = 0.0;
    for (int end = 0; end < 2; ++end) moment = std::max(moment, std::hypot(fe[6 * end + 4], fe[6 * end + 5]));
    const double torque = std::abs(fe[9]);
    const double sa = N / sec.A;
    const double sb = moment * el.radius / sec.I;
    const double tau = torque * el.radius / sec.J;
    res.axial_stress[e] = sa;
    res.von_mises[e] = std::sqrt((std::abs(sa) + sb) * (std::abs(sa) + sb) + 3.0 * tau * tau);
  }

  const double diag = m.bounds().diagonal();
  if (res.max_deflection > 0.1 * diag)
    res.warnings.push_back("maximum deflection exceeds 10% of the model size; linear kinematics is questionable");
  return res;
}

/// Convenience: assembles the load case and solves.
inline SolveResult solve_static(const BeamModel& m, const LoadCase& lc, const SolveOptions& opt = {}) {
  return solve_static(m, load_vector(m, lc), opt);
}

}  // namespace glat
