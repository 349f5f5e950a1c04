#pragma once

#include "glat/core/quadrature.hpp"
#include "glat/core/types.hpp"
#include "glat/spline/tensor_spline.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace glat {

/// Trivariate with the given 8 corners (index = ix + 2*iy + 4*iz), tri-linear.
inline SplineVolume trilinear_volume(const std::array<Vec3, 8>& corners) {
  std::vector<Vec3> ctrl(corners.begin(), corners.end());
  const auto kv = KnotVector::bezier(1);
  return SplineVolume({kv, kv, kv}, std::move(ctrl));
}

/// Axis-aligned box [lo, hi] as a tri-linear volume.
inline SplineVolume box_volume(const Vec3& lo, const Vec3& hi) {
  std::array<Vec3, 8> c;
  for (int i = 0; i < 8; ++i)
    c[i] = Vec3(i & 1 ? hi.x() : lo.x(), i & 2 ? hi.y() : lo.y(), i & 4 ? hi.z() : lo.z());
  return trilinear_volume(c);
}

inline SplineVolume unit_cube() { return box_volume(Vec3::Zero(), Vec3::Ones()); }

/// Image of the unit cube under x -> a x + b.
inline SplineVolume affine_volume(const Mat3& a, const Vec3& b) {
  return unit_cube().transformed([&](const Vec3& p) -> Vec3 { return a * p + b; });
}

/// Greville abscissae of a knot vector.
inline std::vector<double> greville(const KnotVector& kv) {
  std::vector<double> g(kv.count());
  for (int i = 0; i < kv.count(); ++i) {
    double s = 0.0;
    for (int k = 1; k <= kv.degree(); ++k) s += kv.knots()[i + k];
    g[i] = kv.degree() > 0 ? s / kv.degree() : kv.knots()[i];
  }
  return g;
}

struct BladeDimensions {
  double span = 0.090;        ///< radial length (x), m
  double chord_root = 0.040;  ///< m
  double chord_tip = 0.032;
  double thickness_root = 0.0080;
  double thickness_tip = 0.0055;
  double twist_tip_deg = 20.0;  ///< stagger change root to tip, quadratic in span
};

/// Twisted, tapered blade-like macro volume: degrees (2,1,1), 5x2x2 control
/// net. u runs along the span (world x), v across the chord, w through the
/// thickness. The root section sits at u = 0, x = 0.
inline SplineVolume blade_macro(const BladeDimensions& dim = {}) {
  const auto ku = KnotVector::uniform(2, 5);
  const auto kl = KnotVector::bezier(1);
  const auto g = greville(ku);
  std::vector<Vec3> ctrl(5 * 2 * 2);
  for (int k = 0; k < 2; ++k)
    for (int j = 0; j < 2; ++j)
      for (int i = 0; i < 5; ++i) {
        const double s = g[i];
        const double chord = dim.chord_root + (dim.chord_tip - dim.chord_root) * s;
        const double thick = dim.thickness_root + (dim.thickness_tip - dim.thickness_root) * s;
        const double twist = deg2rad(dim.twist_tip_deg) * s * s;
        const double y = (j - 0.5) * chord, z = (k - 0.5) * thick;
        ctrl[i + 5 * (j + 2 * k)] =
            Vec3(dim.span * s, std::cos(twist) * y - std::sin(twist) * z, std::sin(twist) * y + std::cos(twist) * z);
      }
  return SplineVolume({ku, kl, kl}, std::move(ctrl));
}

/// Exact rational sphere (revolved semicircle); u runs pole to pole, v around.
inline SplineSurface rational_sphere(double radius, const Vec3& center = Vec3::Zero()) {
  const double h = std::sqrt(0.5);
  const KnotVector ku(2, {0, 0, 0, 0.5, 0.5, 1, 1, 1});
  const KnotVector kv(2, {0, 0, 0, 0.25, 0.25, 0.5, 0.5, 0.75, 0.75, 1, 1, 1});
  const double mr[5] = {0, 1, 1, 1, 0}, mz[5] = {-1, -1, 0, 1, 1}, mw[5] = {1, h, 1, h, 1};
  const double cx[9] = {1, 1, 0, -1, -1, -1, 0, 1, 1}, cy[9] = {0, 1, 1, 1, 0, -1, -1, -1, 0};
  const double cw[9] = {1, h, 1, h, 1, h, 1, h, 1};
  std::vector<Vec3> ctrl;
  std::vector<double> w;
  for (int j = 0; j < 9; ++j)
    for (int i = 0; i < 5; ++i) {
      ctrl.push_back(center + radius * Vec3(mr[i] * cx[j], mr[i] * cy[j], mz[i]));
      w.push_back(mw[i] * cw[j]);
    }
  return SplineSurface({ku, kv}, std::move(ctrl), std::move(w));
}

/// Boundary face of a volume as a surface whose S_a x S_b normal points
/// outward for positively oriented volumes. face = 2*dir + side.
inline SplineSurface boundary_face(const SplineVolume& vol, int face) {
  const int dir = face / 2, side = face % 2;
  int a = (dir + 1) % 3, b = (dir + 2) % 3;
  if (side == 0) std::swap(a, b);
  const auto c = vol.counts();
  std::vector<Vec3> ctrl;
  std::vector<double> w;
  for (int jb = 0; jb < c[b]; ++jb)
    for (int ja = 0; ja < c[a]; ++ja) {
      SplineVolume::Index ijk{};
      ijk[dir] = side ? c[dir] - 1 : 0;
      ijk[a] = ja;
      ijk[b] = jb;
      ctrl.push_back(vol.at(ijk));
      if (vol.rational()) w.push_back(vol.weight(vol.index(ijk)));
    }
  return SplineSurface({vol.knots(a), vol.knots(b)}, std::move(ctrl), std::move(w));
}

/// Quadrature over every knot span of a tensor spline: calls f(param, weight).
template <int P, int D, class F>
void integrate_spans(const TensorSpline<P, D>& s, int extra_order, F&& f) {
  std::array<std::vector<std::pair<double, double>>, P> rules;
  for (int d = 0; d < P; ++d) {
    const auto bp = s.knots(d).breakpoints();
    const int n = s.degree(d) + extra_order;
    for (std::size_t k = 0; k + 1 < bp.size(); ++k) {
      auto r = gauss_legendre(n, bp[k], bp[k + 1]);
      rules[d].insert(rules[d].end(), r.begin(), r.end());
    }
  }
  std::array<std::size_t, P> idx{};
  std::size_t total = 1;
  for (int d = 0; d < P; ++d) total *= rules[d].size();
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rem = flat;
    std::array<double, P> t{};
    double w = 1.0;
    for (int d = 0; d < P; ++d) {
      idx[d] = rem % rules[d].size();
      rem /= rules[d].size();
      t[d] = rules[d][idx[d]].first;
      w *= rules[d][idx[d]].second;
    }
    f(t, w);
  }
}

/// Volume enclosed by a trivariate, by Gauss integration of |det J|.
inline double spline_volume(const SplineVolume& v, int extra_order = 3) {
  double vol = 0.0;
  integrate_spans(v, extra_order, [&](const SplineVolume::Param& t, double w) {
    vol += std::abs(v.jacobian(t).determinant()) * w;
  });
  return vol;
}

/// Surface area by Gauss integration of |S_u x S_v|.
inline double surface_area(const SplineSurface& s, int extra_order = 3) {
  double area = 0.0;
  integrate_spans(s, extra_order, [&](const SplineSurface::Param& t, double w) {
    const auto j = s.jacobian(t);
    area += Vec3(j.col(0)).cross(Vec3(j.col(1))).norm() * w;
  });
  return area;
}

}  // namespace glat
