#pragma once

#include "glat/beam/assembly.hpp"
#include "glat/beam/element.hpp"
#include "glat/beam/static_solver.hpp"
#include "glat/core/parallel.hpp"
#include "glat/lattice/lattice.hpp"

#include <Eigen/Sparse>

#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace glat {

/// Solver failure during a design evaluation; carries the coefficients.
class EvaluationError : public NumericalError {
 public:
  EvaluationError(const std::string& what, std::vector<double> coefficients)
      : NumericalError(what), coefficients_(std::move(coefficients)) {}
  const std::vector<double>& coefficients() const { return coefficients_; }

 private:
  std::vector<double> coefficients_;
};

/// Compliance minimisation over grading coefficients. Element radii are linear
/// in the coefficients: r = radius_map * c.
struct DesignProblem {
  BeamModel model;  // clamps applied; radii are overwritten per evaluation
  Eigen::SparseMatrix<double, Eigen::RowMajor> radius_map;
  LoadCase load;
  double lower = 0.0, upper = 0.0;
  std::optional<double> mass_budget;
  std::vector<double> initial;
  SolveOptions solve;
  std::array<int, 3> field_counts{1, 1, 1};  // layout of the coefficients (for reporting)

  std::size_t size() const { return std::size_t(radius_map.cols()); }

  std::vector<std::string> violations() const {
    std::vector<std::string> v;
    if (!(lower > 0)) v.push_back("lower bound must be positive");
    if (!(upper > lower)) v.push_back("upper bound must exceed the lower bound");
    if (initial.size() != size()) v.push_back("initial coefficient count does not match the design variables");
    for (double c : initial)
      if (!(c >= lower && c <= upper)) {
        v.push_back("initial coefficients must lie within the bounds");
        break;
      }
    if (std::size_t(radius_map.rows()) != model.elements.size()) v.push_back("radius map does not match the elements");
    if (mass_budget && !(*mass_budget > 0)) v.push_back("mass budget must be positive");
    return v;
  }
  void validate() const {
    const auto v = violations();
    if (!v.empty()) throw ParameterError(v.front());
  }
};

struct Evaluation {
  double compliance = 0.0;
  double mass = 0.0;
  Eigen::VectorXd u, f;
  BeamModel model;
};

namespace detail {

inline std::string format_coefficients(const std::vector<double>& c) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < c.size(); ++i) os << (i ? ", " : "") << format_double(c[i]);
  os << ']';
  return os.str();
}

inline Eigen::VectorXd radii(const DesignProblem& p, const std::vector<double>& c) {
  return p.radius_map * Eigen::Map<const Eigen::VectorXd>(c.data(), Eigen::Index(c.size()));
}

inline Evaluation evaluate_unchecked(const DesignProblem& p, const std::vector<double>& c) {
  if (c.size() != p.size()) throw ParameterError("coefficient count mismatch");
  Evaluation ev;
  ev.model = p.model;
  const Eigen::VectorXd r = radii(p, c);
  for (std::size_t e = 0; e < ev.model.elements.size(); ++e) {
    if (!(r[Eigen::Index(e)] > 0))
      throw EvaluationError("non-positive radius for coefficients " + format_coefficients(c), c);
    ev.model.elements[e].radius = r[Eigen::Index(e)];
  }
  ev.mass = ev.model.mass();
  try {
    ev.f = load_vector(ev.model, p.load);
    auto res = solve_static(ev.model, ev.f, p.solve);
    ev.compliance = res.compliance;
    ev.u = std::move(res.u);
  } catch (const NumericalError& e) {
    throw EvaluationError(std::string(e.what()) + " at coefficients " + format_coefficients(c), c);
  }
  return ev;
}

}  // namespace detail

/// Lattice beam model graded by the lattice's grading; design variables are
/// the grading coefficients.
inline DesignProblem make_design_problem(const LatticeModel& lat, int elements_per_strut, const Material& mat,
                                         const LoadCase& load, double lower, double upper,
                                         std::optional<double> mass_budget = std::nullopt) {
  const auto bl = extract_beam_model(lat, elements_per_strut, mat);
  DesignProblem p;
  p.model = bl.model;
  apply_clamps(p.model, load.fixed, bl.node_params);
  p.load = load;
  p.lower = lower;
  p.upper = upper;
  p.mass_budget = mass_budget;
  p.initial = lat.grading.coefficients();
  p.field_counts = lat.grading.kind() == Grading::Kind::Field ? lat.grading.counts()
                                                              : std::array<int, 3>{int(lat.grading.size()), 1, 1};
  std::vector<Eigen::Triplet<double>> trip;
  for (std::size_t e = 0; e < bl.element_strut.size(); ++e) {
    const auto& info = lat.struts[std::size_t(bl.element_strut[e])];
    for (auto [k, w] : lat.grading.basis(info.grading_param))
      trip.emplace_back(int(e), k, info.radius_scale * w);
  }
  p.radius_map.resize(Eigen::Index(bl.model.elements.size()), Eigen::Index(lat.grading.size()));
  p.radius_map.setFromTriplets(trip.begin(), trip.end());
  p.validate();
  return p;
}

/// Compliance f.u and mass sum(rho pi r^2 l) of a design.
inline Evaluation evaluate(const DesignProblem& p, const std::vector<double>& c) {
  for (double v : c)
    if (!(v >= p.lower && v <= p.upper))
      throw ParameterError("coefficients outside the bounds: " + detail::format_coefficients(c));
  return detail::evaluate_unchecked(p, c);
}

inline double design_mass(const DesignProblem& p, const std::vector<double>& c) {
  const Eigen::VectorXd r = detail::radii(p, c);
  double m = 0.0;
  for (std::size_t e = 0; e < p.model.elements.size(); ++e) {
    const auto& el = p.model.elements[e];
    m += el.material.rho * kPi * r[Eigen::Index(e)] * r[Eigen::Index(e)] * p.model.length(el);
  }
  return m;
}

inline std::vector<double> mass_gradient(const DesignProblem& p, const std::vector<double>& c) {
  const Eigen::VectorXd r = detail::radii(p, c);
  Eigen::VectorXd dr(r.size());
  for (std::size_t e = 0; e < p.model.elements.size(); ++e) {
    const auto& el = p.model.elements[e];
    dr[Eigen::Index(e)] = 2.0 * el.material.rho * kPi * r[Eigen::Index(e)] * p.model.length(el);
  }
  const Eigen::VectorXd g = p.radius_map.transpose() * dr;
  return {g.data(), g.data() + g.size()};
}

enum class GradientMode { FiniteDifference, SemiAnalytic };

/// d(compliance)/d(coefficients). Semi-analytic: -u^T dK u + 2 u^T df per
/// element radius, chained through the radius map; df carries the change of
/// the centrifugal load with element mass. Finite differences are central with
/// step 1e-6 * (upper - lower).
inline std::vector<double> gradient(const DesignProblem& p, const std::vector<double>& c, GradientMode mode,
                                    const Evaluation* at = nullptr) {
  if (mode == GradientMode::FiniteDifference) {
    const double h = 1e-6 * (p.upper - p.lower);
    std::vector<double> g(c.size());
    for (std::size_t k = 0; k < c.size(); ++k) {
      auto cp = c, cm = c;
      cp[k] += h;
      cm[k] -= h;
      g[k] = (detail::evaluate_unchecked(p, cp).compliance - detail::evaluate_unchecked(p, cm).compliance) / (2 * h);
    }
    return g;
  }

  std::optional<Evaluation> own;
  if (!at) at = &own.emplace(detail::evaluate_unchecked(p, c));
  const auto& m = at->model;
  const double w2 = p.load.omega * p.load.omega;
  Eigen::VectorXd dcdr(Eigen::Index(m.elements.size()));
  parallel_for(m.elements.size(), [&](std::size_t e) {
    const auto& el = m.elements[e];
    Mat12 K, dK;
    element_stiffness(m.nodes[el.a], m.nodes[el.b], el.radius, el.material, K, &dK, p.solve.shear_rigid);
    Vec12 ue;
    ue << at->u.segment<6>(6 * el.a), at->u.segment<6>(6 * el.b);
    double d = -ue.dot(dK * ue);
    if (w2 > 0) {
      const double dmass = el.material.rho * kPi * 2.0 * el.radius * m.length(el);
      const Vec3 dF = 0.5 * dmass * w2 * radial_vector(p.load, 0.5 * (m.nodes[el.a] + m.nodes[el.b]));
      for (int n : {el.a, el.b})
        if (!m.is_clamped(n)) d += 2.0 * at->u.segment<3>(6 * n).dot(dF);
    }
    dcdr[Eigen::Index(e)] = d;
  });
  const Eigen::VectorXd g = p.radius_map.transpose() * dcdr;
  return {g.data(), g.data() + g.size()};
}

/// Per-layer mean of field coefficients along one coefficient axis.
inline std::vector<double> layer_averages(const std::array<int, 3>& counts, const std::vector<double>& c, int axis) {
  std::vector<double> sum(std::size_t(counts[axis]), 0.0);
  std::vector<int> n(sum.size(), 0);
  for (int k = 0; k < counts[2]; ++k)
    for (int j = 0; j < counts[1]; ++j)
      for (int i = 0; i < counts[0]; ++i) {
        const int idx[3] = {i, j, k};
        sum[std::size_t(idx[axis])] += c[std::size_t(i + counts[0] * (j + counts[1] * k))];
        ++n[std::size_t(idx[axis])];
      }
  for (std::size_t l = 0; l < sum.size(); ++l) sum[l] /= n[l];
  return sum;
}

}  // namespace glat
