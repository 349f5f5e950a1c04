#pragma once

#include "glat/core/error.hpp"
#include "glat/core/parallel.hpp"
#include "glat/spline/tensor_spline.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <string>
#include <vector>

namespace glat {

/// Samples on a tensor grid of parameters; points[i + n0*(j + n1*k)] belongs
/// to (params[0][i], params[1][j], params[2][k]).
template <int P, int D>
struct GridSamples {
  std::array<std::vector<double>, P> params;
  std::vector<Eigen::Matrix<double, D, 1>> points;

  std::size_t size() const {
    std::size_t n = 1;
    for (const auto& p : params) n *= p.size();
    return n;
  }
};

template <int P, int D>
struct FitResult {
  TensorSpline<P, D> spline;
  double max_residual = 0.0;
};

/// Uniformly spaced parameters covering [a, b] with n >= 2 entries.
inline std::vector<double> uniform_params(int n, double a = 0.0, double b = 1.0) {
  std::vector<double> t(n);
  for (int i = 0; i < n; ++i) t[i] = (i == n - 1) ? b : a + (b - a) * double(i) / double(n - 1);
  return t;
}

namespace detail {

inline Eigen::MatrixXd checked_pinv(const Eigen::MatrixXd& a, int dir) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  qr.setThreshold(1e-12);
  if (qr.rank() < a.cols())
    throw NumericalError("singular normal equations in direction " + std::to_string(dir) + " (rank " +
                         std::to_string(qr.rank()) + " < " + std::to_string(a.cols()) + ")");
  return qr.solve(Eigen::MatrixXd::Identity(a.rows(), a.rows()));
}

// Linear map from samples at `t` to control points of `kv`: the least-squares
// left inverse of the collocation matrix, or with `interpolate_ends` the
// least-squares fit whose end control points reproduce the end samples.
inline Eigen::MatrixXd fit_operator(const KnotVector& kv, const std::vector<double>& t, int dir,
                                    bool interpolate_ends) {
  const int m = int(t.size()), n = kv.count();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, n);
  double v[kMaxDegree + 1];
  for (int i = 0; i < m; ++i) {
    const int span = kv.basis(t[i], v);
    for (int k = 0; k <= kv.degree(); ++k) a(i, span - kv.degree() + k) = v[k];
  }
  if (!interpolate_ends || n < 2) return checked_pinv(a, dir);

  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(n, m);
  r(0, 0) = 1.0;
  r(n - 1, m - 1) = 1.0;
  if (n > 2) {
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Identity(m, m);
    rhs.col(0) -= a.col(0);
    rhs.col(m - 1) -= a.col(n - 1);
    r.middleRows(1, n - 2) = checked_pinv(a.middleCols(1, n - 2), dir) * rhs;
  }
  return r;
}

}  // namespace detail

/// Least-squares tensor-product fit with open uniform knots of the given
/// degree and control counts. The tensor structure of the samples makes the
/// least-squares solution separable, so it is computed one direction at a time.
/// With `interpolate_ends` the boundary of the fit depends only on the boundary
/// samples, so fits sharing a face sample agree there exactly.
template <int P, int D>
FitResult<P, D> fit_tensor(const GridSamples<P, D>& samples, const std::array<int, P>& counts,
                           int degree = 3, bool interpolate_ends = false) {
  using Point = Eigen::Matrix<double, D, 1>;
  std::array<KnotVector, P> knots;
  std::array<int, P> dims{};
  for (int d = 0; d < P; ++d) {
    const auto& t = samples.params[d];
    dims[d] = int(t.size());
    if (counts[d] < degree + 1)
      throw ParameterError("fit needs at least degree+1 control points per direction");
    if (dims[d] < counts[d])
      throw NumericalError("underdetermined fit in direction " + std::to_string(d) + ": " +
                           std::to_string(dims[d]) + " samples for " + std::to_string(counts[d]) +
                           " control points");
    if (!std::is_sorted(t.begin(), t.end()) || !(t.back() > t.front()))
      throw ParameterError("sample parameters must be increasing");
    knots[d] = KnotVector::uniform(degree, counts[d], t.front(), t.back());
  }
  if (samples.points.size() != samples.size()) throw ParameterError("sample grid size mismatch");

  std::vector<Point> data = samples.points;
  std::array<int, P> cur = dims;
  for (int d = 0; d < P; ++d) {
    const Eigen::MatrixXd pinv = detail::fit_operator(knots[d], samples.params[d], d, interpolate_ends);
    std::size_t inner = 1, outer = 1;
    for (int e = 0; e < d; ++e) inner *= std::size_t(cur[e]);
    for (int e = d + 1; e < P; ++e) outer *= std::size_t(cur[e]);
    const int m = cur[d], n = counts[d];
    std::vector<Point> next(inner * std::size_t(n) * outer, Point::Zero());
    for (std::size_t o = 0; o < outer; ++o)
      for (int a = 0; a < n; ++a)
        for (int i = 0; i < m; ++i) {
          const double c = pinv(a, i);
          if (c == 0.0) continue;
          const Point* src = &data[(o * m + i) * inner];
          Point* dst = &next[(o * n + a) * inner];
          for (std::size_t s = 0; s < inner; ++s) dst[s] += c * src[s];
        }
    data.swap(next);
    cur[d] = n;
  }

  FitResult<P, D> result{TensorSpline<P, D>(knots, std::move(data)), 0.0};
  std::vector<double> residual(samples.points.size(), 0.0);
  parallel_for(samples.points.size(), [&](std::size_t flat) {
    std::array<double, P> t{};
    std::size_t rem = flat;
    for (int d = 0; d < P; ++d) {
      t[d] = samples.params[d][rem % std::size_t(dims[d])];
      rem /= std::size_t(dims[d]);
    }
    residual[flat] = (result.spline.eval(t) - samples.points[flat]).norm();
  });
  for (double r : residual) result.max_residual = std::max(result.max_residual, r);
  return result;
}

/// Tri-cubic least-squares fit of gridded volume samples.
inline FitResult<3, 3> fit_tricubic(const GridSamples<3, 3>& samples, const std::array<int, 3>& counts,
                                    bool interpolate_ends = false) {
  return fit_tensor<3, 3>(samples, counts, 3, interpolate_ends);
}

/// Samples `f(t)` on the tensor grid given by `params`.
template <int P, int D, class F>
GridSamples<P, D> sample_grid(const std::array<std::vector<double>, P>& params, F&& f) {
  GridSamples<P, D> s;
  s.params = params;
  s.points.resize(s.size());
  parallel_for(s.points.size(), [&](std::size_t flat) {
    std::array<double, P> t{};
    std::size_t rem = flat;
    for (int d = 0; d < P; ++d) {
      t[d] = params[d][rem % params[d].size()];
      rem /= params[d].size();
    }
    s.points[flat] = f(t);
  });
  return s;
}

}  // namespace glat
