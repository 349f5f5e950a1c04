#pragma once

#include "glat/optim/design.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

namespace glat {

struct OptimizeOptions {
  int max_iterations = 25;
  double gradient_tol = 1e-6;     // projected KKT residual, scaled variables
  double step_tol = 1e-8;         // max step in scaled variables
  double feasibility_tol = 1e-8;  // relative mass violation allowed
  GradientMode gradient = GradientMode::SemiAnalytic;
};

struct TraceRow {
  int iteration = 0;
  double objective = 0.0;  // compliance
  double mass = 0.0;
  double violation = 0.0;  // max(0, mass / budget - 1)
  double step_norm = 0.0;
  double gradient_norm = 0.0;  // projected KKT residual
  double step_length = 0.0;    // line-search alpha
  double multiplier = 0.0;     // mass constraint, scaled
};

struct OptimizationTrace {
  std::vector<TraceRow> rows;
  bool converged = false;
  std::string reason;

  void write_csv(std::ostream& os) const {
    os << "iteration,objective,mass,violation,step_norm,gradient_norm,step_length,multiplier\n";
    for (const auto& r : rows)
      os << r.iteration << ',' << format_double(r.objective) << ',' << format_double(r.mass) << ','
         << format_double(r.violation) << ',' << format_double(r.step_norm) << ',' << format_double(r.gradient_norm)
         << ',' << format_double(r.step_length) << ',' << format_double(r.multiplier) << '\n';
  }
  void write_csv_file(const std::string& path) const {
    std::ofstream os(path);
    if (!os) throw ParameterError("cannot write " + path);
    write_csv(os);
  }
};

struct OptimizeResult {
  std::vector<double> coefficients;
  double compliance = 0.0;
  double mass = 0.0;
  OptimizationTrace trace;
};

namespace detail {

// min q.d + 0.5 d'Bd over lo <= d <= hi by cyclic coordinate descent (B SPD).
inline Eigen::VectorXd box_qp(const Eigen::MatrixXd& B, const Eigen::VectorXd& q, const Eigen::VectorXd& lo,
                              const Eigen::VectorXd& hi) {
  const Eigen::Index n = q.size();
  Eigen::VectorXd d = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd Bd = Eigen::VectorXd::Zero(n);
  for (int sweep = 0; sweep < 20000; ++sweep) {
    double change = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double di = std::clamp(d[i] - (q[i] + Bd[i]) / B(i, i), lo[i], hi[i]);
      const double delta = di - d[i];
      if (delta != 0.0) {
        Bd += delta * B.col(i);
        d[i] = di;
        change = std::max(change, std::abs(delta));
      }
    }
    if (change < 1e-14) break;
  }
  return d;
}

}  // namespace detail

/// Sequential quadratic programming on the grading coefficients: box bounds
/// plus an optional mass budget. Each step solves a convex QP with a damped
/// BFGS Hessian (box QP with the mass multiplier found by bisection), then
/// backtracks on an l1 merit function. Trial points that overshoot the budget
/// are pulled back toward the lower bound, so every accepted iterate is feasible.
inline OptimizeResult optimize(const DesignProblem& p, const OptimizeOptions& opt = {}) {
  p.validate();
  const std::size_t n = p.size();
  const double range = p.upper - p.lower;
  const double budget = p.mass_budget.value_or(0.0);
  const bool constrained = p.mass_budget.has_value();

  std::vector<double> lower_c(n, p.lower);
  if (constrained && design_mass(p, lower_c) > budget * (1 + opt.feasibility_tol))
    throw ParameterError("mass budget " + format_double(budget) + " kg is below the mass at the lower bounds (" +
                         format_double(design_mass(p, lower_c)) + " kg)");

  auto to_c = [&](const Eigen::VectorXd& x) {
    std::vector<double> c(n);
    for (std::size_t i = 0; i < n; ++i) c[i] = p.lower + range * std::clamp(x[Eigen::Index(i)], 0.0, 1.0);
    return c;
  };
  // Shrinks x toward the lower bounds until the mass budget holds.
  auto restore = [&](Eigen::VectorXd x) {
    if (!constrained || design_mass(p, to_c(x)) <= budget) return x;
    double a = 0.0, b = 1.0;
    for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
      const double t = 0.5 * (a + b);
      (design_mass(p, to_c(t * x)) <= budget ? a : b) = t;
    }
    return Eigen::VectorXd(a * x);
  };

  Eigen::VectorXd x(n);
  for (std::size_t i = 0; i < n; ++i) x[Eigen::Index(i)] = (p.initial[i] - p.lower) / range;
  x = restore(x);
  auto ev = detail::evaluate_unchecked(p, to_c(x));
  const double c0 = ev.compliance > 0 ? ev.compliance : 1.0;
  const double mscale = constrained ? budget : 1.0;

  auto scaled_grad = [&](const Evaluation& e, const std::vector<double>& c) {
    const auto g = gradient(p, c, opt.gradient, &e);
    Eigen::VectorXd out(n);
    for (std::size_t i = 0; i < n; ++i) out[Eigen::Index(i)] = g[i] * range / c0;
    return out;
  };
  auto scaled_mass_grad = [&](const std::vector<double>& c) {
    const auto g = mass_gradient(p, c);
    Eigen::VectorXd out(n);
    for (std::size_t i = 0; i < n; ++i) out[Eigen::Index(i)] = g[i] * range / mscale;
    return out;
  };
  auto violation = [&](double mass) { return constrained ? std::max(0.0, mass / budget - 1.0) : 0.0; };

  OptimizeResult res;
  auto record = [&](int it, const Evaluation& e, double step, double kkt, double alpha, double mu) {
    res.trace.rows.push_back({it, e.compliance, e.mass, violation(e.mass), step, kkt, alpha, mu});
  };

  std::vector<double> c = to_c(x);
  Eigen::VectorXd g = scaled_grad(ev, c);
  Eigen::VectorXd a = constrained ? scaled_mass_grad(c) : Eigen::VectorXd::Zero(n);
  Eigen::MatrixXd B = Eigen::MatrixXd::Identity(n, n) * std::max(4.0 * g.lpNorm<Eigen::Infinity>(), 1e-8);
  double nu = 0.0;
  record(0, ev, 0.0, 0.0, 0.0, 0.0);

  for (int it = 1; it <= opt.max_iterations; ++it) {
    const double h0 = constrained ? ev.mass / budget - 1.0 : -1.0;
    const Eigen::VectorXd lo = -x, hi = Eigen::VectorXd::Ones(n) - x;
    auto step_for = [&](double mu) { return detail::box_qp(B, g + mu * a, lo, hi); };
    double mu = 0.0;
    Eigen::VectorXd d = step_for(0.0);
    if (constrained && h0 + a.dot(d) > 0) {
      double mhi = 1.0;
      while (h0 + a.dot(step_for(mhi)) > 0 && mhi < 1e12) mhi *= 4;
      double mlo = 0.0;
      for (int k = 0; k < 100 && mhi - mlo > 1e-13 * std::max(1.0, mhi); ++k) {
        const double m = 0.5 * (mlo + mhi);
        (h0 + a.dot(step_for(m)) > 0 ? mlo : mhi) = m;
      }
      mu = mhi;
      d = step_for(mu);
    }

    Eigen::VectorXd proj = x - (g + mu * a);
    for (Eigen::Index i = 0; i < proj.size(); ++i) proj[i] = std::clamp(proj[i], 0.0, 1.0);
    const double kkt = (proj - x).lpNorm<Eigen::Infinity>();
    const double dnorm = d.lpNorm<Eigen::Infinity>();
    if (kkt < opt.gradient_tol || dnorm < opt.step_tol) {
      record(it, ev, 0.0, kkt, 0.0, mu);
      res.trace.converged = true;
      res.trace.reason = kkt < opt.gradient_tol ? "projected gradient below tolerance" : "step below tolerance";
      break;
    }

    nu = std::max(nu, 1.5 * mu + 1e-12);
    const double merit0 = ev.compliance / c0 + nu * std::max(0.0, h0);
    const double slope = g.dot(d) - nu * std::max(0.0, h0);
    double alpha = 1.0;
    bool accepted = false;
    Eigen::VectorXd xn;
    Evaluation evn;
    for (int ls = 0; ls < 30; ++ls, alpha *= 0.5) {
      xn = restore((x + alpha * d).cwiseMax(0.0).cwiseMin(1.0));
      evn = detail::evaluate_unchecked(p, to_c(xn));
      const double hn = constrained ? evn.mass / budget - 1.0 : -1.0;
      const double merit = evn.compliance / c0 + nu * std::max(0.0, hn);
      if (merit <= merit0 + 1e-4 * alpha * std::min(slope, 0.0)) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      record(it, ev, 0.0, kkt, 0.0, mu);
      res.trace.reason = "line search failed";
      break;
    }

    const std::vector<double> cn = to_c(xn);
    const Eigen::VectorXd gn = scaled_grad(evn, cn);
    const Eigen::VectorXd an = constrained ? scaled_mass_grad(cn) : Eigen::VectorXd::Zero(n);
    const Eigen::VectorXd s = xn - x;
    Eigen::VectorXd y = (gn + mu * an) - (g + mu * a);
    const double sBs = s.dot(B * s);
    if (sBs > 0) {
      const double sy = s.dot(y);
      if (sy < 0.2 * sBs) {
        const double theta = 0.8 * sBs / (sBs - sy);
        y = theta * y + (1 - theta) * (B * s);
      }
      const Eigen::VectorXd Bs = B * s;
      B += y * y.transpose() / s.dot(y) - Bs * Bs.transpose() / sBs;
    }

    x = xn;
    ev = std::move(evn);
    g = gn;
    a = an;
    record(it, ev, s.lpNorm<Eigen::Infinity>(), kkt, alpha, mu);
    if (it == opt.max_iterations) res.trace.reason = "iteration limit";
  }
  if (res.trace.reason.empty()) res.trace.reason = "iteration limit";

  res.coefficients = to_c(x);
  res.compliance = ev.compliance;
  res.mass = ev.mass;
  return res;
}

/// Uniform design (all coefficients equal) whose mass equals `mass`.
inline std::vector<double> uniform_design_with_mass(const DesignProblem& p, double mass) {
  const double m1 = design_mass(p, std::vector<double>(p.size(), 1.0));
  return std::vector<double>(p.size(), std::sqrt(mass / m1));
}

}  // namespace glat
