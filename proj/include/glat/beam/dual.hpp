#pragma once

#include <cmath>

namespace glat {

/// Forward-mode dual number: value plus one directional derivative.
struct Dual {
  double v = 0.0, d = 0.0;
  Dual() = default;
  Dual(double value, double deriv = 0.0) : v(value), d(deriv) {}
};

inline Dual operator+(Dual a, Dual b) { return {a.v + b.v, a.d + b.d}; }
inline Dual operator-(Dual a, Dual b) { return {a.v - b.v, a.d - b.d}; }
inline Dual operator-(Dual a) { return {-a.v, -a.d}; }
inline Dual operator*(Dual a, Dual b) { return {a.v * b.v, a.d * b.v + a.v * b.d}; }
inline Dual operator/(Dual a, Dual b) { return {a.v / b.v, (a.d * b.v - a.v * b.d) / (b.v * b.v)}; }

inline double value_of(double x) { return x; }
inline double value_of(const Dual& x) { return x.v; }
inline double deriv_of(double) { return 0.0; }
inline double deriv_of(const Dual& x) { return x.d; }

}  // namespace glat
