#pragma once

#include "glat/core/error.hpp"
#include "glat/core/types.hpp"
#include "glat/spline/tensor_spline.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

namespace glat {

/// What a grading value means: a tile thickness (fraction of the cell) or a
/// strut radius (m).
enum class GradedQuantity { Thickness, Radius };

/// Scalar grading over the macro parameter box [0,1]^3. Every variant is linear
/// in its coefficients: value(t) = sum_k phi_k(t) c_k.
///  - uniform: one coefficient
///  - bands: equal-width slabs along one parametric axis, one value each
///  - field: quadratic tensor B-spline (degree min(2, n-1) per direction)
class Grading;
/// Design-variable view of a grading.
using ParameterField = Grading;

class Grading {
 public:
  enum class Kind { Uniform, Bands, Field };

  static Grading uniform(double value, GradedQuantity q = GradedQuantity::Thickness) {
    Grading g;
    g.kind_ = Kind::Uniform;
    g.quantity_ = q;
    g.coeffs_ = {value};
    return g;
  }

  static Grading bands(int axis, std::vector<double> values, GradedQuantity q = GradedQuantity::Thickness) {
    if (axis < 0 || axis > 2) throw ParameterError("band axis must be 0, 1 or 2");
    if (values.empty()) throw ParameterError("bands need at least one value");
    Grading g;
    g.kind_ = Kind::Bands;
    g.quantity_ = q;
    g.axis_ = axis;
    g.coeffs_ = std::move(values);
    return g;
  }

  static Grading field(std::array<int, 3> counts, std::vector<double> coeffs,
                       GradedQuantity q = GradedQuantity::Thickness) {
    std::array<KnotVector, 3> kv;
    std::size_t n = 1;
    for (int d = 0; d < 3; ++d) {
      if (counts[d] < 1) throw ParameterError("field needs at least one coefficient per direction");
      kv[d] = KnotVector::uniform(std::min(2, counts[d] - 1), counts[d]);
      n *= std::size_t(counts[d]);
    }
    if (coeffs.size() != n)
      throw ParameterError("field has " + std::to_string(coeffs.size()) + " coefficients, expected " + std::to_string(n));
    Grading g;
    g.kind_ = Kind::Field;
    g.quantity_ = q;
    g.counts_ = counts;
    std::vector<ScalarVolume::Point> ctrl(n);
    for (std::size_t i = 0; i < n; ++i) ctrl[i][0] = coeffs[i];
    g.spline_ = ScalarVolume(kv, std::move(ctrl));
    g.coeffs_ = std::move(coeffs);
    return g;
  }

  static Grading constant_field(std::array<int, 3> counts, double value, GradedQuantity q = GradedQuantity::Thickness) {
    return field(counts, std::vector<double>(std::size_t(counts[0]) * counts[1] * counts[2], value), q);
  }

  Kind kind() const { return kind_; }
  GradedQuantity quantity() const { return quantity_; }
  int band_axis() const { return axis_; }
  const std::array<int, 3>& counts() const { return counts_; }
  std::size_t size() const { return coeffs_.size(); }
  const std::vector<double>& coefficients() const { return coeffs_; }

  void set_coefficients(const std::vector<double>& c) {
    if (c.size() != coeffs_.size()) throw ParameterError("coefficient count mismatch");
    coeffs_ = c;
    if (kind_ == Kind::Field)
      for (std::size_t i = 0; i < c.size(); ++i) spline_.control()[i][0] = c[i];
  }

  /// Nonzero basis values phi_k(t) at a parameter point.
  std::vector<std::pair<int, double>> basis(const Vec3& t) const {
    switch (kind_) {
      case Kind::Uniform: return {{0, 1.0}};
      case Kind::Bands: {
        const int n = int(coeffs_.size());
        const double u = std::clamp(t[axis_], 0.0, 1.0);
        return {{std::min(n - 1, int(std::floor(u * n))), 1.0}};
      }
      case Kind::Field: {
        std::array<std::vector<std::pair<int, double>>, 3> b;
        for (int d = 0; d < 3; ++d) b[d] = spline_.knots(d).eval_basis(t[d]);
        std::vector<std::pair<int, double>> out;
        for (auto [k, wk] : b[2])
          for (auto [j, wj] : b[1])
            for (auto [i, wi] : b[0]) {
              const double w = wi * wj * wk;
              if (w != 0.0) out.emplace_back(int(spline_.index({i, j, k})), w);
            }
        return out;
      }
    }
    return {};
  }

  double operator()(const Vec3& t) const {
    double v = 0.0;
    for (auto [k, w] : basis(t)) v += w * coeffs_[k];
    return v;
  }

  double min_coefficient() const { return *std::min_element(coeffs_.begin(), coeffs_.end()); }
  double max_coefficient() const { return *std::max_element(coeffs_.begin(), coeffs_.end()); }

 private:
  Kind kind_ = Kind::Uniform;
  GradedQuantity quantity_ = GradedQuantity::Thickness;
  int axis_ = 0;
  std::array<int, 3> counts_{1, 1, 1};
  std::vector<double> coeffs_{0.0};
  ScalarVolume spline_;
};

}  // namespace glat
