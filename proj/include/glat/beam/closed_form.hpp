#pragma once

#include "glat/beam/element.hpp"
#include "glat/beam/model.hpp"

#include <cmath>

namespace glat {

/// First bending frequency (Hz) of a clamped-free rectangular bar of length L,
/// width b and thickness t: 1.875^2 / (2 pi L^2) sqrt(E I / (rho A)).
/// area_factor and inertia_factor scale A and I of the solid section.
inline double cantilever_frequency(double L, double b, double t, const Material& mat, double area_factor = 1.0,
                                   double inertia_factor = 1.0) {
  if (!(L > 0 && b > 0 && t > 0)) throw ParameterError("cantilever dimensions must be positive");
  const double A = b * t * area_factor;
  const double I = b * t * t * t / 12.0 * inertia_factor;
  const double beta = 1.875;
  return beta * beta / (2.0 * kPi * L * L) * std::sqrt(mat.E * I / (mat.rho * A));
}

/// Frequency after removing a fraction of the area (and mass) with the moment
/// of inertia unchanged.
inline double frequency_after_area_reduction(double f, double reduction) {
  if (!(reduction >= 0 && reduction < 1)) throw ParameterError("area reduction must lie in [0, 1)");
  return f * std::sqrt(1.0 / (1.0 - reduction));
}

/// Tip deflection of a circular cantilever under an end load: bending plus shear.
inline double cantilever_tip_deflection(double P, double L, double r, const Material& mat, bool with_shear = true) {
  const auto s = circular_section(r);
  double d = P * L * L * L / (3.0 * mat.E * s.I);
  if (with_shear) d += P * L / (shear_correction(mat.nu) * mat.G() * s.A);
  return d;
}

/// Straight clamped-free beam along x split into n elements (node 0 clamped).
inline BeamModel straight_cantilever(double L, double r, int n, const Material& mat, const Vec3& dir = Vec3::UnitX()) {
  BeamModel m;
  for (int i = 0; i <= n; ++i) m.add_node(dir.normalized() * (L * i / n));
  for (int i = 0; i < n; ++i) m.add_element(i, i + 1, r, mat);
  m.clamp(0);
  return m;
}

}  // namespace glat
