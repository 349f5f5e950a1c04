#pragma once

#include "glat/core/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

namespace glat {

/// Maximum supported polynomial degree per direction.
inline constexpr int kMaxDegree = 7;

/// Clamped, non-decreasing knot vector of a B-spline basis.
class KnotVector {
 public:
  KnotVector() = default;

  KnotVector(int degree, std::vector<double> knots) : degree_(degree), knots_(std::move(knots)) {
    validate();
  }

  /// Open uniform knot vector with `count` basis functions on [a, b].
  static KnotVector uniform(int degree, int count, double a = 0.0, double b = 1.0) {
    if (count < degree + 1) throw ParameterError("uniform knot vector needs count >= degree + 1");
    std::vector<double> k;
    k.reserve(count + degree + 1);
    for (int i = 0; i <= degree; ++i) k.push_back(a);
    const int spans = count - degree;
    for (int i = 1; i < spans; ++i) k.push_back(a + (b - a) * double(i) / double(spans));
    for (int i = 0; i <= degree; ++i) k.push_back(b);
    return KnotVector(degree, std::move(k));
  }

  /// Bezier knot vector [a..a, b..b] of the given degree.
  static KnotVector bezier(int degree, double a = 0.0, double b = 1.0) {
    return uniform(degree, degree + 1, a, b);
  }

  int degree() const { return degree_; }
  const std::vector<double>& knots() const { return knots_; }
  int count() const { return int(knots_.size()) - degree_ - 1; }
  double front() const { return knots_[degree_]; }
  double back() const { return knots_[knots_.size() - 1 - degree_]; }

  /// Distinct interior breakpoints including the domain ends.
  std::vector<double> breakpoints() const {
    std::vector<double> b;
    for (std::size_t i = degree_; i + degree_ < knots_.size(); ++i)
      if (b.empty() || knots_[i] > b.back()) b.push_back(knots_[i]);
    return b;
  }

  /// Clamps u into the domain, throwing if it lies outside by more than a
  /// relative 1e-12.
  double check_domain(double u) const {
    const double a = front(), b = back();
    const double slack = 1e-12 * std::max(1.0, b - a);
    if (!(u >= a - slack && u <= b + slack))
      throw DomainError("parameter " + std::to_string(u) + " outside [" + std::to_string(a) + ", " +
                        std::to_string(b) + "]");
    return std::clamp(u, a, b);
  }

  /// Index of the knot span containing u (u already inside the domain).
  int find_span(double u) const {
    const int n = count() - 1;
    if (u >= knots_[n + 1]) return n;
    if (u <= knots_[degree_]) {
      int s = degree_;
      while (knots_[s + 1] <= u) ++s;
      return s;
    }
    auto it = std::upper_bound(knots_.begin() + degree_, knots_.begin() + n + 1, u);
    return int(it - knots_.begin()) - 1;
  }

  /// Nonzero basis values and first derivatives at u:
  /// values[k] = N_{span-degree+k}(u). Returns the span.
  int basis(double u, double* values, double* derivs = nullptr) const {
    u = check_domain(u);
    const int span = find_span(u);
    const int p = degree_;
    // ndu table of the standard triangular recurrence.
    double ndu[kMaxDegree + 1][kMaxDegree + 1];
    double left[kMaxDegree + 1], right[kMaxDegree + 1];
    ndu[0][0] = 1.0;
    for (int j = 1; j <= p; ++j) {
      left[j] = u - knots_[span + 1 - j];
      right[j] = knots_[span + j] - u;
      double saved = 0.0;
      for (int r = 0; r < j; ++r) {
        ndu[j][r] = right[r + 1] + left[j - r];
        const double temp = ndu[r][j - 1] / ndu[j][r];
        ndu[r][j] = saved + right[r + 1] * temp;
        saved = left[j - r] * temp;
      }
      ndu[j][j] = saved;
    }
    for (int j = 0; j <= p; ++j) values[j] = ndu[j][p];
    if (derivs) {
      if (p == 0) {
        derivs[0] = 0.0;
      } else {
        for (int r = 0; r <= p; ++r) {
          double d = 0.0;
          if (r >= 1) d += ndu[r - 1][p - 1] / ndu[p][r - 1];
          if (r <= p - 1) d -= ndu[r][p - 1] / ndu[p][r];
          derivs[r] = d * p;
        }
      }
    }
    return span;
  }

  /// (index, value) pairs of the degree+1 basis functions nonzero at u.
  std::vector<std::pair<int, double>> eval_basis(double u) const {
    double v[kMaxDegree + 1];
    const int span = basis(u, v);
    std::vector<std::pair<int, double>> out;
    out.reserve(degree_ + 1);
    for (int k = 0; k <= degree_; ++k) out.emplace_back(span - degree_ + k, v[k]);
    return out;
  }

  bool operator==(const KnotVector& o) const { return degree_ == o.degree_ && knots_ == o.knots_; }

 private:
  void validate() const {
    if (degree_ < 0 || degree_ > kMaxDegree)
      throw ParameterError("knot vector degree must be in [0, " + std::to_string(kMaxDegree) + "]");
    if (int(knots_.size()) < 2 * (degree_ + 1))
      throw ParameterError("knot vector too short for its degree");
    for (std::size_t i = 1; i < knots_.size(); ++i)
      if (!(knots_[i] >= knots_[i - 1])) throw ParameterError("knot vector must be non-decreasing");
    for (int i = 1; i <= degree_; ++i) {
      if (knots_[i] != knots_[0] || knots_[knots_.size() - 1 - i] != knots_.back())
        throw ParameterError("knot vector must be clamped");
    }
    if (!(back() > front())) throw ParameterError("knot vector has an empty domain");
  }

  int degree_ = 0;
  std::vector<double> knots_;
};

}  // namespace glat
