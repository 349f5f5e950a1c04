#pragma once

#include "glat/core/error.hpp"
#include "glat/core/parallel.hpp"
#include "glat/spline/fitting.hpp"
#include "glat/spline/sampling.hpp"
#include "glat/spline/tensor_spline.hpp"

#include <algorithm>
#include <string>

namespace glat {

struct ComposeOptions {
  int grid = 6;           ///< initial control points per direction of the result
  int max_grid = 16;      ///< refinement stops here
  int sample_factor = 4;  ///< samples per direction = sample_factor * grid
  double tolerance = 0;   ///< absolute; <= 0 selects 1e-3 * macro bbox diagonal
  int validation_points = 512;
  bool interpolate_ends = true;  ///< faces of the result depend only on face samples
};

struct ComposeResult {
  SplineVolume volume;
  double max_deviation = 0.0;  ///< measured at off-grid validation points
  double tolerance = 0.0;
  int grid = 0;
};

/// Maps a tile-space point into the macro parameter box, rejecting escapes.
inline SplineVolume::Param to_macro_param(const SplineVolume& macro, const Vec3& p) {
  SplineVolume::Param t{};
  for (int d = 0; d < 3; ++d) {
    auto [a, b] = macro.domain(d);
    const double slack = 1e-9 * (b - a);
    if (p[d] < a - slack || p[d] > b + slack)
      throw DomainError("tile image leaves the macro domain in direction " + std::to_string(d) +
                        " (value " + std::to_string(p[d]) + ")");
    t[d] = std::clamp(p[d], a, b);
  }
  return t;
}

/// Tri-cubic approximation of macro(tile(.)), refined until the deviation at
/// off-grid validation points is within tolerance.
inline ComposeResult compose(const SplineVolume& macro, const SplineVolume& tile,
                             const ComposeOptions& opt = {}) {
  const double tol = opt.tolerance > 0 ? opt.tolerance : 1e-3 * macro.control_bounds().diagonal();
  auto pointwise = [&](const SplineVolume::Param& s) -> Vec3 {
    return macro.eval(to_macro_param(macro, tile.eval(s)));
  };

  std::array<std::pair<double, double>, 3> dom{tile.domain(0), tile.domain(1), tile.domain(2)};
  std::vector<SplineVolume::Param> check(opt.validation_points);
  std::vector<Vec3> expected(check.size());
  for (std::size_t i = 0; i < check.size(); ++i) {
    const auto h = halton<3>(i);
    for (int d = 0; d < 3; ++d) check[i][d] = dom[d].first + h[d] * (dom[d].second - dom[d].first);
  }
  parallel_for(check.size(), [&](std::size_t i) { expected[i] = pointwise(check[i]); });

  double achieved = 0.0;
  for (int n = std::max(opt.grid, 4);;) {
    const int m = std::max(opt.sample_factor * n, n + 1);
    std::array<std::vector<double>, 3> params;
    for (int d = 0; d < 3; ++d) params[d] = uniform_params(m, dom[d].first, dom[d].second);
    auto samples = sample_grid<3, 3>(params, pointwise);
    auto fit = fit_tricubic(samples, {n, n, n}, opt.interpolate_ends);

    std::vector<double> dev(check.size());
    parallel_for(check.size(), [&](std::size_t i) { dev[i] = (fit.spline.eval(check[i]) - expected[i]).norm(); });
    achieved = std::max(fit.max_residual, *std::max_element(dev.begin(), dev.end()));
    if (achieved <= tol) return {std::move(fit.spline), achieved, tol, n};
    if (n >= opt.max_grid) break;
    n = std::min(opt.max_grid, n + std::max(1, n / 2));
  }
  throw ApproximationError("composition deviation " + std::to_string(achieved) + " exceeds tolerance " +
                               std::to_string(tol) + " at the maximum grid size",
                           achieved);
}

}  // namespace glat
