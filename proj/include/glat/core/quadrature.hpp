#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <utility>
#include <vector>

namespace glat {

/// Gauss-Legendre rule on [a, b] (Golub-Welsch).
inline std::vector<std::pair<double, double>> gauss_legendre(int n, double a = 0.0, double b = 1.0) {
  Eigen::MatrixXd jm = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) {
    const double beta = i / std::sqrt(4.0 * i * i - 1.0);
    jm(i, i - 1) = jm(i - 1, i) = beta;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jm);
  std::vector<std::pair<double, double>> rule(n);
  for (int i = 0; i < n; ++i) {
    const double x = es.eigenvalues()(i);
    const double w = 2.0 * es.eigenvectors()(0, i) * es.eigenvectors()(0, i);
    rule[i] = {a + 0.5 * (x + 1.0) * (b - a), 0.5 * w * (b - a)};
  }
  return rule;
}

}  // namespace glat
