#pragma once

#include "glat/beam/dual.hpp"
#include "glat/beam/model.hpp"
#include "glat/core/error.hpp"
#include "glat/core/types.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace glat {

using Mat12 = Eigen::Matrix<double, 12, 12>;
using Vec12 = Eigen::Matrix<double, 12, 1>;

/// Shear correction factor of a solid circular section.
inline double shear_correction(double nu) { return 6.0 * (1.0 + nu) / (7.0 + 6.0 * nu); }

struct SectionProps {
  double A, I, J;
};
inline SectionProps circular_section(double r) {
  const double r2 = r * r;
  return {kPi * r2, 0.25 * kPi * r2 * r2, 0.5 * kPi * r2 * r2};
}

/// Local 12x12 Timoshenko stiffness of a circular beam of radius r and length L.
/// DOF order per node: u v w rx ry rz; local x runs from node a to node b.
/// shear_rigid drops the shear term (Euler-Bernoulli limit).
template <class T, class Out>
void local_stiffness(const T& r, double L, const Material& m, bool shear_rigid, Out& K) {
  const T r2 = r * r;
  const T A = T(kPi) * r2;
  const T I = T(0.25 * kPi) * r2 * r2;
  const T J = T(0.5 * kPi) * r2 * r2;
  const double E = m.E, G = m.G(), kappa = shear_correction(m.nu);
  const T phi = shear_rigid ? T(0.0) : T(12.0 * E) * I / (T(kappa * G * L * L) * A);
  const T ea = T(E / L) * A, gj = T(G / L) * J;
  const T k = T(E / (L * L * L)) * I / (T(1.0) + phi);
  const T c12 = T(12.0) * k, c6 = T(6.0 * L) * k;
  const T c4 = (T(4.0) + phi) * T(L * L) * k, c2 = (T(2.0) - phi) * T(L * L) * k;

  for (int i = 0; i < 12; ++i)
    for (int j = 0; j < 12; ++j) K(i, j) = T(0.0);
  auto set = [&](int i, int j, const T& v) {
    K(i, j) = v;
    K(j, i) = v;
  };
  set(0, 0, ea); set(6, 6, ea); set(0, 6, -ea);
  set(3, 3, gj); set(9, 9, gj); set(3, 9, -gj);
  // bending in the local x-y plane (v, rz)
  set(1, 1, c12); set(7, 7, c12); set(1, 7, -c12);
  set(1, 5, c6); set(1, 11, c6); set(5, 7, -c6); set(7, 11, -c6);
  set(5, 5, c4); set(11, 11, c4); set(5, 11, c2);
  // bending in the local x-z plane (w, ry)
  set(2, 2, c12); set(8, 8, c12); set(2, 8, -c12);
  set(2, 4, -c6); set(2, 10, -c6); set(4, 8, c6); set(8, 10, c6);
  set(4, 4, c4); set(10, 10, c4); set(4, 10, c2);
}

/// Rows are the local axes in global coordinates.
inline Mat3 element_frame(const Vec3& a, const Vec3& b) {
  const Vec3 x = (b - a).normalized();
  const Vec3 ref = std::abs(x.z()) < 0.9 ? Vec3::UnitZ() : Vec3::UnitY();
  const Vec3 y = ref.cross(x).normalized();
  const Vec3 z = x.cross(y);
  Mat3 R;
  R.row(0) = x;
  R.row(1) = y;
  R.row(2) = z;
  return R;
}

inline Mat12 frame_transform(const Mat3& R) {
  Mat12 T = Mat12::Zero();
  for (int k = 0; k < 4; ++k) T.block<3, 3>(3 * k, 3 * k) = R;
  return T;
}

/// Global element stiffness and, optionally, its derivative with respect to the radius.
inline void element_stiffness(const Vec3& a, const Vec3& b, double r, const Material& m, Mat12& K,
                              Mat12* dK = nullptr, bool shear_rigid = false) {
  const double L = (b - a).norm();
  if (!(L > 0)) throw DegeneracyError("zero-length beam element");
  const Mat12 T = frame_transform(element_frame(a, b));
  if (dK) {
    struct {
      Dual a[12][12];
      Dual& operator()(int i, int j) { return a[i][j]; }
    } kd;
    local_stiffness(Dual(r, 1.0), L, m, shear_rigid, kd);
    Mat12 kv, kr;
    for (int i = 0; i < 12; ++i)
      for (int j = 0; j < 12; ++j) {
        kv(i, j) = kd(i, j).v;
        kr(i, j) = kd(i, j).d;
      }
    K = T.transpose() * kv * T;
    *dK = T.transpose() * kr * T;
  } else {
    Mat12 kl;
    local_stiffness(r, L, m, shear_rigid, kl);
    K = T.transpose() * kl * T;
  }
}

inline Mat12 element_stiffness(const BeamModel& model, const BeamElement& e, bool shear_rigid = false) {
  Mat12 K;
  element_stiffness(model.nodes[e.a], model.nodes[e.b], e.radius, e.material, K, nullptr, shear_rigid);
  return K;
}

}  // namespace glat
