#pragma once

#include "glat/core/error.hpp"
#include "glat/core/types.hpp"
#include "glat/spline/knot_vector.hpp"

#include <Eigen/Dense>

#include <array>
#include <string>
#include <utility>
#include <vector>

namespace glat {

/// Tensor-product B-spline map from a P-dimensional parameter box into R^D,
/// optionally rational. Control points are stored with the first parametric
/// direction running fastest.
template <int P, int D>
class TensorSpline {
  static_assert(P >= 1 && P <= 3, "1 to 3 parametric directions");

 public:
  using Point = Eigen::Matrix<double, D, 1>;
  using Jacobian = Eigen::Matrix<double, D, P>;
  using Param = std::array<double, P>;
  using Index = std::array<int, P>;

  static constexpr int kParamDim = P;
  static constexpr int kValueDim = D;

  TensorSpline() = default;

  TensorSpline(std::array<KnotVector, P> knots, std::vector<Point> control,
               std::vector<double> weights = {})
      : knots_(std::move(knots)), control_(std::move(control)), weights_(std::move(weights)) {
    std::size_t n = 1;
    for (const auto& kv : knots_) n *= std::size_t(kv.count());
    if (control_.size() != n)
      throw ParameterError("control grid has " + std::to_string(control_.size()) +
                           " points, knot vectors require " + std::to_string(n));
    if (!weights_.empty()) {
      if (weights_.size() != n) throw ParameterError("weight count does not match control grid");
      for (double w : weights_)
        if (!(w > 0.0)) throw ParameterError("rational weights must be strictly positive");
    }
  }

  const KnotVector& knots(int dir) const { return knots_[dir]; }
  const std::array<KnotVector, P>& knot_vectors() const { return knots_; }
  int degree(int dir) const { return knots_[dir].degree(); }
  int count(int dir) const { return knots_[dir].count(); }
  Index counts() const {
    Index c{};
    for (int d = 0; d < P; ++d) c[d] = count(d);
    return c;
  }

  bool rational() const { return !weights_.empty(); }
  const std::vector<Point>& control() const { return control_; }
  std::vector<Point>& control() { return control_; }
  const std::vector<double>& weights() const { return weights_; }
  double weight(std::size_t i) const { return weights_.empty() ? 1.0 : weights_[i]; }

  std::size_t index(const Index& ijk) const {
    std::size_t idx = 0, stride = 1;
    for (int d = 0; d < P; ++d) {
      idx += std::size_t(ijk[d]) * stride;
      stride *= std::size_t(count(d));
    }
    return idx;
  }
  const Point& at(const Index& ijk) const { return control_[index(ijk)]; }

  std::pair<double, double> domain(int dir) const { return {knots_[dir].front(), knots_[dir].back()}; }

  /// Map evaluation. Throws DomainError outside the parameter box.
  Point eval(const Param& t) const {
    Point value;
    evaluate(t, &value, nullptr);
    return value;
  }

  template <class... T>
    requires(sizeof...(T) == P)
  Point operator()(T... t) const {
    return eval(Param{double(t)...});
  }

  /// Columns are partial derivatives with respect to each parameter.
  Jacobian jacobian(const Param& t) const {
    Point value;
    Jacobian jac;
    evaluate(t, &value, &jac);
    return jac;
  }

  void eval_with_jacobian(const Param& t, Point& value, Jacobian& jac) const {
    evaluate(t, &value, &jac);
  }

  /// Bounding box of the control points (contains the image for positive weights).
  Aabb control_bounds() const
    requires(D == 3)
  {
    Aabb box;
    for (const auto& c : control_) box.extend(Vec3(c));
    return box;
  }

  /// Returns a copy with every control point mapped by f. Exact for affine f.
  template <class F>
  TensorSpline transformed(F&& f) const {
    TensorSpline out = *this;
    for (auto& c : out.control_) c = f(c);
    return out;
  }

  bool operator==(const TensorSpline& o) const {
    return knots_ == o.knots_ && control_ == o.control_ && weights_ == o.weights_;
  }

 private:
  void evaluate(const Param& t, Point* value, Jacobian* jac) const {
    double basis[P][kMaxDegree + 1];
    double dbasis[P][kMaxDegree + 1];
    int first[P];
    int order[P];
    for (int d = 0; d < P; ++d) {
      const int span = knots_[d].basis(t[d], basis[d], jac ? dbasis[d] : nullptr);
      first[d] = span - knots_[d].degree();
      order[d] = knots_[d].degree() + 1;
    }

    Point num = Point::Zero();
    double den = 0.0;
    Jacobian dnum = Jacobian::Zero();
    Eigen::Matrix<double, 1, P> dden = Eigen::Matrix<double, 1, P>::Zero();

    int local[3] = {0, 0, 0};
    int total = 1;
    for (int d = 0; d < P; ++d) total *= order[d];
    for (int flat = 0; flat < total; ++flat) {
      int rem = flat;
      for (int d = 0; d < P; ++d) {
        local[d] = rem % order[d];
        rem /= order[d];
      }
      Index ijk{};
      double n = 1.0;
      for (int d = 0; d < P; ++d) {
        ijk[d] = first[d] + local[d];
        n *= basis[d][local[d]];
      }
      const std::size_t ci = index(ijk);
      const double w = weight(ci);
      num += (n * w) * control_[ci];
      den += n * w;
      if (jac) {
        for (int d = 0; d < P; ++d) {
          double dn = dbasis[d][local[d]];
          for (int e = 0; e < P; ++e)
            if (e != d) dn *= basis[e][local[e]];
          dnum.col(d) += (dn * w) * control_[ci];
          dden(d) += dn * w;
        }
      }
    }
    const Point x = num / den;
    if (value) *value = x;
    if (jac) {
      for (int d = 0; d < P; ++d) jac->col(d) = (dnum.col(d) - dden(d) * x) / den;
    }
  }

  std::array<KnotVector, P> knots_;
  std::vector<Point> control_;
  std::vector<double> weights_;
};

using SplineVolume = TensorSpline<3, 3>;
using SplineSurface = TensorSpline<2, 3>;
using ScalarVolume = TensorSpline<3, 1>;

}  // namespace glat
