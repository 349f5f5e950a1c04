#pragma once

#include "glat/beam/element.hpp"
#include "glat/beam/model.hpp"
#include "glat/core/parallel.hpp"

#include <Eigen/Sparse>

#include <vector>

namespace glat {

using SparseMat = Eigen::SparseMatrix<double>;

/// Element stiffness matrices in global coordinates, computed in parallel.
inline std::vector<Mat12> element_matrices(const BeamModel& m, bool shear_rigid = false) {
  std::vector<Mat12> out(m.elements.size());
  parallel_for(m.elements.size(), [&](std::size_t i) { out[i] = element_stiffness(m, m.elements[i], shear_rigid); });
  return out;
}

inline SparseMat assemble_global(const BeamModel& m, const std::vector<Mat12>& ke) {
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(ke.size() * 144);
  for (std::size_t e = 0; e < ke.size(); ++e) {
    const int nd[2] = {m.elements[e].a, m.elements[e].b};
    for (int i = 0; i < 12; ++i)
      for (int j = 0; j < 12; ++j) {
        const double v = ke[e](i, j);
        if (v != 0.0) trip.emplace_back(6 * nd[i / 6] + i % 6, 6 * nd[j / 6] + j % 6, v);
      }
  }
  SparseMat K(Eigen::Index(m.dof_count()), Eigen::Index(m.dof_count()));
  K.setFromTriplets(trip.begin(), trip.end());
  return K;
}

inline SparseMat assemble_stiffness(const BeamModel& m, bool shear_rigid = false) {
  return assemble_global(m, element_matrices(m, shear_rigid));
}

/// Perpendicular vector from the rotation axis to x.
inline Vec3 radial_vector(const LoadCase& lc, const Vec3& x) {
  const Vec3 a = lc.axis_dir.normalized();
  const Vec3 d = x - lc.axis_point;
  return d - d.dot(a) * a;
}

/// Centrifugal force m omega^2 r of each element at its midpoint, lumped half to
/// each end node; clamped DOFs are zeroed.
inline Eigen::VectorXd centrifugal_load(const BeamModel& m, const LoadCase& lc) {
  lc.validate();
  Eigen::VectorXd f = Eigen::VectorXd::Zero(Eigen::Index(m.dof_count()));
  const double w2 = lc.omega * lc.omega;
  if (w2 == 0.0) return f;
  for (const auto& e : m.elements) {
    const double mass = e.material.rho * kPi * e.radius * e.radius * m.length(e);
    const Vec3 F = 0.5 * mass * w2 * radial_vector(lc, 0.5 * (m.nodes[e.a] + m.nodes[e.b]));
    f.segment<3>(6 * e.a) += F;
    f.segment<3>(6 * e.b) += F;
  }
  for (std::size_t n = 0; n < m.nodes.size(); ++n)
    if (m.is_clamped(int(n))) f.segment<6>(6 * n).setZero();
  return f;
}

/// Centrifugal load plus nodal loads, clamped DOFs zeroed.
inline Eigen::VectorXd load_vector(const BeamModel& m, const LoadCase& lc) {
  Eigen::VectorXd f = centrifugal_load(m, lc);
  for (const auto& nl : lc.nodal) {
    if (nl.node < 0 || nl.node >= int(m.nodes.size())) throw ParameterError("nodal load on a missing node");
    if (m.is_clamped(nl.node)) continue;
    f.segment<3>(6 * nl.node) += nl.force;
    f.segment<3>(6 * nl.node + 3) += nl.moment;
  }
  return f;
}

}  // namespace glat
