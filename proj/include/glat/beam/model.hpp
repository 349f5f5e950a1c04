#pragma once

#include "glat/core/error.hpp"
#include "glat/core/types.hpp"

#include <string>
#include <vector>

namespace glat {

struct Material {
  double E = 208e9;    // Pa
  double nu = 0.3;
  double rho = 8220.0;  // kg/m^3

  double G() const { return E / (2.0 * (1.0 + nu)); }

  std::vector<std::string> violations() const {
    std::vector<std::string> v;
    if (!(E > 0)) v.push_back("Young's modulus must be positive");
    if (!(rho > 0)) v.push_back("density must be positive");
    if (!(nu > -1.0 && nu < 0.5)) v.push_back("Poisson ratio must lie in (-1, 0.5)");
    return v;
  }
  void validate() const {
    auto v = violations();
    if (!v.empty()) throw ParameterError("invalid material: " + v.front());
  }
};

/// Circular-section beam element between two nodes.
struct BeamElement {
  int a = 0, b = 0;
  double radius = 0.0;
  Material material;
};

/// Beam frame with 6 DOF per node (ux uy uz rx ry rz).
struct BeamModel {
  std::vector<Vec3> nodes;
  std::vector<BeamElement> elements;
  std::vector<char> clamped;  // per node; empty = none

  int add_node(const Vec3& p) {
    nodes.push_back(p);
    return int(nodes.size()) - 1;
  }
  void add_element(int a, int b, double r, const Material& m = {}) { elements.push_back({a, b, r, m}); }

  std::size_t dof_count() const { return 6 * nodes.size(); }
  bool is_clamped(int node) const { return !clamped.empty() && clamped[node]; }
  void clamp(int node) {
    clamped.resize(nodes.size(), 0);
    clamped[node] = 1;
  }
  int clamped_count() const {
    int n = 0;
    for (char c : clamped) n += c ? 1 : 0;
    return n;
  }

  double length(const BeamElement& e) const { return (nodes[e.b] - nodes[e.a]).norm(); }

  double mass() const {
    double m = 0.0;
    for (const auto& e : elements) m += e.material.rho * kPi * e.radius * e.radius * length(e);
    return m;
  }

  Aabb bounds() const {
    Aabb b;
    for (const auto& n : nodes) b.extend(n);
    return b;
  }

  void validate() const {
    if (!clamped.empty() && clamped.size() != nodes.size()) throw ParameterError("clamp flags do not match nodes");
    for (std::size_t i = 0; i < elements.size(); ++i) {
      const auto& e = elements[i];
      if (e.a < 0 || e.b < 0 || e.a >= int(nodes.size()) || e.b >= int(nodes.size()))
        throw ParameterError("element " + std::to_string(i) + " references a missing node");
      if (!(e.radius > 0)) throw ParameterError("element " + std::to_string(i) + " has non-positive radius");
      if (!(length(e) > 0)) throw DegeneracyError("element " + std::to_string(i) + " has zero length");
      e.material.validate();
    }
  }
};

struct NodalLoad {
  int node = 0;
  Vec3 force = Vec3::Zero();
  Vec3 moment = Vec3::Zero();
};

/// Which nodes are clamped: nodes on a macro parameter face, or nodes in the
/// half-space (x - point) . normal <= tol.
struct FixedSelector {
  enum class Kind { None, ParamFace, HalfSpace };
  Kind kind = Kind::None;
  int face = 0;  // 2 * axis + side, parametric
  Vec3 point = Vec3::Zero();
  Vec3 normal = Vec3::UnitX();
  double tol = 1e-9;

  static FixedSelector param_face(int f, double tol = 1e-9) {
    FixedSelector s;
    s.kind = Kind::ParamFace;
    s.face = f;
    s.tol = tol;
    return s;
  }
  static FixedSelector half_space(const Vec3& p, const Vec3& n, double tol = 1e-9) {
    FixedSelector s;
    s.kind = Kind::HalfSpace;
    s.point = p;
    s.normal = n.normalized();
    s.tol = tol;
    return s;
  }

  bool selects(const Vec3& x, const Vec3& param) const {
    switch (kind) {
      case Kind::None: return false;
      case Kind::ParamFace: {
        const int a = face / 2;
        return std::abs(param[a] - double(face % 2)) <= tol;
      }
      case Kind::HalfSpace: return (x - point).dot(normal) <= tol;
    }
    return false;
  }
};

/// Rotation about an axis plus optional nodal loads.
struct LoadCase {
  double omega = 0.0;  // rad/s
  Vec3 axis_point = Vec3::Zero();
  Vec3 axis_dir = Vec3::UnitY();
  FixedSelector fixed;
  std::vector<NodalLoad> nodal;

  void validate() const {
    if (!(omega >= 0)) throw ParameterError("angular speed must be non-negative");
    if (!(axis_dir.norm() > 0)) throw ParameterError("rotation axis direction must be non-zero");
  }
};

inline double rpm_to_rad_per_s(double rpm) { return rpm * 2.0 * kPi / 60.0; }

/// Clamps every node picked by the selector; node_params may be empty for
/// spatial selectors.
inline void apply_clamps(BeamModel& m, const FixedSelector& sel, const std::vector<Vec3>& node_params = {}) {
  if (sel.kind == FixedSelector::Kind::ParamFace && node_params.size() != m.nodes.size())
    throw ParameterError("parametric clamp selector needs node parameters");
  m.clamped.assign(m.nodes.size(), 0);
  for (std::size_t i = 0; i < m.nodes.size(); ++i)
    if (sel.selects(m.nodes[i], node_params.empty() ? Vec3::Zero() : node_params[i])) m.clamped[i] = 1;
}

}  // namespace glat
