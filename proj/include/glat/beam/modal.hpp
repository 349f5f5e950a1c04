#pragma once

#include "glat/beam/assembly.hpp"
#include "glat/beam/model.hpp"
#include "glat/beam/static_solver.hpp"
#include "glat/core/error.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace glat {

/// Diagonal lumped mass: half of each element's mass on each end node; each
/// rotational DOF gets m L^2 / 24 + m r^2 / 4 from every incident element.
inline Eigen::VectorXd lumped_mass(const BeamModel& m) {
  Eigen::VectorXd d = Eigen::VectorXd::Zero(Eigen::Index(m.dof_count()));
  for (const auto& e : m.elements) {
    const double L = m.length(e);
    const double mass = e.material.rho * kPi * e.radius * e.radius * L;
    const double rot = mass * L * L / 24.0 + mass * e.radius * e.radius / 4.0;
    for (int node : {e.a, e.b}) {
      for (int c = 0; c < 3; ++c) d[6 * node + c] += 0.5 * mass;
      for (int c = 3; c < 6; ++c) d[6 * node + c] += rot;
    }
  }
  return d;
}

struct ModalOptions {
  int dense_limit = 3000;  // free DOFs solved densely
  int max_iterations = 300;
  double tolerance = 1e-10;
};

/// Lowest natural frequencies (Hz, ascending) of the clamped model, from
/// K phi = lambda M phi with the lumped mass.
inline std::vector<double> lowest_frequencies(const BeamModel& m, int count, const ModalOptions& opt = {}) {
  m.validate();
  if (count < 1) throw ParameterError("frequency count must be at least 1");
  std::vector<int> free_of(m.dof_count(), -1);
  int nf = 0;
  std::vector<char> node_fixed(m.nodes.size(), 0);
  for (std::size_t i = 0; i < m.nodes.size(); ++i) {
    node_fixed[i] = m.is_clamped(int(i));
    for (int c = 0; c < 6; ++c)
      if (!node_fixed[i]) free_of[6 * i + c] = nf++;
  }
  if (count > nf)
    throw ParameterError("requested " + std::to_string(count) + " frequencies but the model has only " +
                         std::to_string(nf) + " free DOFs");
  if (m.clamped_count() == 0) throw NumericalError("modal analysis needs a clamped model");
  detail::check_supported(m, node_fixed);

  const SparseMat K = assemble_stiffness(m);
  const Eigen::VectorXd mass = lumped_mass(m);
  std::vector<Eigen::Triplet<double>> trip;
  for (int c = 0; c < K.outerSize(); ++c)
    for (SparseMat::InnerIterator it(K, c); it; ++it) {
      const int r = free_of[it.row()], cc = free_of[it.col()];
      if (r >= 0 && cc >= 0) trip.emplace_back(r, cc, it.value());
    }
  SparseMat Kff(nf, nf);
  Kff.setFromTriplets(trip.begin(), trip.end());
  Eigen::VectorXd Mf(nf);
  for (std::size_t i = 0; i < free_of.size(); ++i)
    if (free_of[i] >= 0) Mf[free_of[i]] = mass[Eigen::Index(i)];
  for (Eigen::Index i = 0; i < nf; ++i)
    if (!(Mf[i] > 0)) throw NumericalError("free DOF without mass");

  std::vector<double> lambda;
  if (nf <= opt.dense_limit) {
    const Eigen::VectorXd s = Mf.cwiseSqrt().cwiseInverse();
    Eigen::MatrixXd A = s.asDiagonal() * Eigen::MatrixXd(Kff) * s.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericalError("dense eigen-solver failed");
    for (int i = 0; i < count; ++i) lambda.push_back(es.eigenvalues()[i]);
  } else {
    // Subspace iteration with Rayleigh-Ritz projection.
    Eigen::SimplicialLDLT<SparseMat> ldlt(Kff);
    if (ldlt.info() != Eigen::Success) throw NumericalError("LDLT factorisation failed in modal analysis");
    const int p = std::min(nf, std::max(2 * count, count + 8));
    Eigen::MatrixXd X(nf, p);
    for (int j = 0; j < p; ++j)
      for (int i = 0; i < nf; ++i) X(i, j) = std::cos(0.37 * (i + 1) * (j + 1)) + (j == 0 ? 1.0 : 0.0);
    Eigen::VectorXd prev = Eigen::VectorXd::Constant(count, -1.0);
    double change = 0.0;
    int it = 0;
    for (; it < opt.max_iterations; ++it) {
      Eigen::MatrixXd Y = ldlt.solve(Mf.asDiagonal() * X);
      const Eigen::MatrixXd Kr = Y.transpose() * (Kff * Y);
      const Eigen::MatrixXd Mr = Y.transpose() * Mf.asDiagonal() * Y;
      Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(0.5 * (Kr + Kr.transpose()),
                                                                    0.5 * (Mr + Mr.transpose()));
      if (ges.info() != Eigen::Success) throw NumericalError("projected eigenproblem failed at iteration " + std::to_string(it));
      X = Y * ges.eigenvectors();
      const Eigen::VectorXd ev = ges.eigenvalues().head(count);
      change = ((ev - prev).cwiseAbs().array() / ev.cwiseAbs().array()).maxCoeff();
      prev = ev;
      if (change < opt.tolerance) break;
    }
    if (it == opt.max_iterations)
      throw NumericalError("subspace iteration did not converge in " + std::to_string(it) +
                           " iterations (relative eigenvalue change " + std::to_string(change) + ")");
    for (int i = 0; i < count; ++i) lambda.push_back(prev[i]);
  }
  std::vector<double> hz;
  for (double l : lambda) hz.push_back(std::sqrt(std::max(l, 0.0)) / (2.0 * kPi));
  return hz;
}

}  // namespace glat
