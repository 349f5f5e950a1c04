#pragma once

#include "glat/core/error.hpp"
#include "glat/spline/fitting.hpp"
#include "glat/spline/tensor_spline.hpp"

#include <algorithm>
#include <vector>

namespace glat {

struct OffsetOptions {
  int grid = 12;          ///< control points per direction of the fitted offset
  int sample_factor = 4;  ///< samples per direction = sample_factor * grid
};

struct OffsetResult {
  SplineSurface surface;
  double max_deviation = 0.0;  ///< |fitted - exact offset| at off-grid points
};

/// Unit normal (S_u x S_v normalized); throws on a vanishing normal.
inline Vec3 surface_normal(const SplineSurface& s, const SplineSurface::Param& t) {
  const auto j = s.jacobian(t);
  const Vec3 n = Vec3(j.col(0)).cross(Vec3(j.col(1)));
  const double scale = j.col(0).norm() * j.col(1).norm();
  if (!(n.norm() > 1e-10 * std::max(scale, 1e-300)))
    throw DegeneracyError("surface normal vanishes at (" + std::to_string(t[0]) + ", " + std::to_string(t[1]) + ")");
  return n.normalized();
}

/// Bicubic approximation of the offset surface S + distance * n. Self-intersections
/// of the offset are not detected.
inline OffsetResult approximate_offset(const SplineSurface& surf, double distance, const OffsetOptions& opt = {}) {
  if (distance == 0.0) return {surf, 0.0};
  auto exact = [&](const SplineSurface::Param& t) -> Vec3 { return surf.eval(t) + distance * surface_normal(surf, t); };

  const int n = std::max(opt.grid, 4);
  const int m = std::max(opt.sample_factor * n, n + 1);
  std::array<std::vector<double>, 2> params;
  for (int d = 0; d < 2; ++d) {
    auto [a, b] = surf.domain(d);
    params[d] = uniform_params(m, a, b);
  }
  auto fit = fit_tensor<2, 3>(sample_grid<2, 3>(params, exact), {n, n}, 3);

  double dev = fit.max_residual;
  for (int i = 0; i + 1 < m; ++i)
    for (int j = 0; j + 1 < m; ++j) {
      const SplineSurface::Param t{0.5 * (params[0][i] + params[0][i + 1]), 0.5 * (params[1][j] + params[1][j + 1])};
      dev = std::max(dev, (fit.spline.eval(t) - exact(t)).norm());
    }
  return {std::move(fit.spline), dev};
}

}  // namespace glat
