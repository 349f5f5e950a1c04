#include "glat/optim/sqp.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace glat;

namespace {

const Material inconel{208e9, 0.3, 8220};

LoadCase spin_load() {
  LoadCase lc;
  lc.omega = rpm_to_rad_per_s(10000);
  lc.axis_point = Vec3(-0.35, 0, 0);
  lc.axis_dir = Vec3::UnitY();
  lc.fixed = FixedSelector::param_face(0);
  return lc;
}

LatticeModel small_lattice(std::array<int, 3> grid, const Grading& g) {
  LatticeOptions lo;
  lo.grid = grid;
  lo.tile.kind = TileKind::CrossAxis;
  lo.compose_solids = false;
  lo.grading = g;
  BladeDimensions dim;
  dim.span = 0.03;
  return build_lattice(blade_macro(dim), lo);
}

// Tip load at every node on the far parametric face.
DesignProblem tip_loaded(const LatticeModel& lat, double lower, double upper) {
  LoadCase lc;
  lc.fixed = FixedSelector::param_face(0);
  auto p = make_design_problem(lat, 2, inconel, lc, lower, upper);
  const auto bl = extract_beam_model(lat, 2, inconel);
  for (std::size_t i = 0; i < bl.node_params.size(); ++i)
    if (bl.node_params[i].x() == 1.0) p.load.nodal.push_back({int(i), Vec3(0, 0, -5.0), Vec3::Zero()});
  return p;
}

DesignProblem single_strut(double budget) {
  DesignProblem p;
  p.model.add_node(Vec3::Zero());
  p.model.add_node(Vec3(0.05, 0, 0));
  p.model.add_element(0, 1, 1e-3, inconel);
  p.model.clamp(0);
  p.radius_map.resize(1, 1);
  p.radius_map.insert(0, 0) = 1.0;
  p.load.nodal.push_back({1, Vec3(0, 0, -10.0), Vec3::Zero()});
  p.lower = 2e-4;
  p.upper = 2e-3;
  p.initial = {2e-3};
  p.mass_budget = budget;
  return p;
}

double rel_err(const std::vector<double>& a, const std::vector<double>& b) {
  double num = 0, den = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num = std::max(num, std::abs(a[i] - b[i]));
    den = std::max(den, std::abs(b[i]));
  }
  return num / den;
}

}  // namespace

TEST(Evaluate, BoundsOrderingUnderFixedLoad) {
  const auto lat = small_lattice({3, 2, 1}, Grading::constant_field({3, 2, 2}, 0.2));
  const auto p = tip_loaded(lat, 0.05, 0.45);
  const auto hi = evaluate(p, std::vector<double>(p.size(), 0.45));
  const auto lo = evaluate(p, std::vector<double>(p.size(), 0.05));
  EXPECT_LT(hi.compliance, lo.compliance);
  EXPECT_GT(hi.mass, lo.mass);
  EXPECT_THROW(evaluate(p, std::vector<double>(p.size(), 0.5)), ParameterError);
}

TEST(Evaluate, ConstantFieldMatchesUniformLattice) {
  const auto lc = spin_load();
  const auto field = small_lattice({3, 2, 1}, Grading::constant_field({3, 2, 2}, 0.3));
  const auto p = make_design_problem(field, 2, inconel, lc, 0.05, 0.45);
  const auto ev = evaluate(p, std::vector<double>(p.size(), 0.3));

  const auto uni = small_lattice({3, 2, 1}, Grading::uniform(0.3));
  auto bl = extract_beam_model(uni, 2, inconel);
  apply_clamps(bl.model, lc.fixed, bl.node_params);
  const auto direct = solve_static(bl.model, lc);
  EXPECT_NEAR(ev.compliance, direct.compliance, 1e-10 * direct.compliance);

  double hand = 0;
  for (const auto& e : bl.model.elements) hand += inconel.rho * kPi * e.radius * e.radius * bl.model.length(e);
  EXPECT_NEAR(ev.mass, hand, 1e-12 * hand);
  EXPECT_NEAR(design_mass(p, std::vector<double>(p.size(), 0.3)), hand, 1e-12 * hand);
}

TEST(Evaluate, SolverFailureCarriesCoefficients) {
  auto p = single_strut(1.0);
  p.model.clamped.clear();
  try {
    evaluate(p, {1e-3});
    FAIL();
  } catch (const EvaluationError& e) {
    ASSERT_EQ(e.coefficients().size(), 1u);
    EXPECT_EQ(e.coefficients()[0], 1e-3);
  }
}

TEST(Gradient, FixedLoadReducesToStiffnessTerm) {
  const auto lat = small_lattice({3, 2, 1}, Grading::constant_field({3, 2, 2}, 0.2));
  const auto p = tip_loaded(lat, 0.05, 0.45);
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> u(0.1, 0.4);
  std::vector<double> c(p.size());
  for (auto& v : c) v = u(rng);
  const auto sa = gradient(p, c, GradientMode::SemiAnalytic);
  const auto fd = gradient(p, c, GradientMode::FiniteDifference);
  EXPECT_LT(rel_err(sa, fd), 1e-3);
  for (double g : sa) EXPECT_LE(g, 0.0);

  // Explicit -u^T dK u per element.
  const auto ev = evaluate(p, c);
  std::vector<double> manual(p.size(), 0.0);
  for (int e = 0; e < p.radius_map.outerSize(); ++e) {
    const auto& el = ev.model.elements[std::size_t(e)];
    Mat12 K, dK;
    element_stiffness(ev.model.nodes[el.a], ev.model.nodes[el.b], el.radius, el.material, K, &dK);
    Vec12 ue;
    ue << ev.u.segment<6>(6 * el.a), ev.u.segment<6>(6 * el.b);
    for (decltype(p.radius_map)::InnerIterator it(p.radius_map, e); it; ++it)
      manual[std::size_t(it.col())] -= it.value() * ue.dot(dK * ue);
  }
  EXPECT_LT(rel_err(sa, manual), 1e-12);
}

TEST(Gradient, CentrifugalSemiAnalyticMatchesFiniteDifference) {
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> u(0.08, 0.42);
  for (int trial = 0; trial < 5; ++trial) {
    const auto lat = small_lattice({3, 1, 1}, Grading::constant_field({3, 2, 2}, 0.2));
    auto p = make_design_problem(lat, 1, inconel, spin_load(), 0.05, 0.45);
    ASSERT_LE(p.model.elements.size(), 100u);
    std::vector<double> c(p.size());
    for (auto& v : c) v = u(rng);
    EXPECT_LT(rel_err(gradient(p, c, GradientMode::SemiAnalytic), gradient(p, c, GradientMode::FiniteDifference)),
              1e-3);
  }
}

TEST(Gradient, MassGradientMatchesFiniteDifference) {
  const auto lat = small_lattice({2, 1, 1}, Grading::constant_field({3, 2, 2}, 0.2));
  const auto p = make_design_problem(lat, 1, inconel, spin_load(), 0.05, 0.45);
  std::vector<double> c(p.size(), 0.21);
  c[3] = 0.33;
  const auto g = mass_gradient(p, c);
  for (std::size_t k = 0; k < c.size(); ++k) {
    auto cp = c, cm = c;
    cp[k] += 1e-6;
    cm[k] -= 1e-6;
    EXPECT_NEAR(g[k], (design_mass(p, cp) - design_mass(p, cm)) / 2e-6, 1e-6 * std::abs(g[k]) + 1e-15);
  }
}

TEST(Optimize, SingleStrutSaturatesBudget) {
  const double L = 0.05, budget = inconel.rho * kPi * 1e-6 * L;  // radius 1 mm
  const auto res = optimize(single_strut(budget));
  EXPECT_TRUE(res.trace.converged);
  EXPECT_NEAR(res.coefficients[0], 1e-3, 1e-9);
  EXPECT_LE(res.mass, budget * (1 + 1e-8));
}

TEST(Optimize, StartAtOptimumStopsImmediately) {
  const double budget = inconel.rho * kPi * 1e-6 * 0.05;
  auto p = single_strut(budget);
  p.initial = {1e-3};
  const auto res = optimize(p);
  EXPECT_TRUE(res.trace.converged);
  ASSERT_LE(res.trace.rows.size(), 2u);
  EXPECT_EQ(res.trace.rows.back().step_norm, 0.0);
  EXPECT_NEAR(res.coefficients[0], 1e-3, 1e-12);
}

TEST(Optimize, InfeasibleBudgetFailsUpFront) {
  EXPECT_THROW(optimize(single_strut(1e-9)), ParameterError);
  auto p = single_strut(1.0);
  p.lower = -1;
  EXPECT_THROW(optimize(p), ParameterError);
}

TEST(Optimize, BladeTraceInvariantsAndGradingShape) {
  const auto lat = small_lattice({6, 2, 1}, Grading::constant_field({3, 2, 2}, 0.45));
  auto p = make_design_problem(lat, 1, inconel, spin_load(), 0.05, 0.45);
  p.mass_budget = 0.5 * design_mass(p, p.initial);
  const auto res = optimize(p);
  EXPECT_TRUE(res.trace.converged) << res.trace.reason;
  EXPECT_LE(res.trace.rows.size(), 26u);
  for (std::size_t i = 1; i < res.trace.rows.size(); ++i)
    EXPECT_LE(res.trace.rows[i].objective, res.trace.rows[i - 1].objective * (1 + 1e-12));
  for (const auto& r : res.trace.rows) EXPECT_LE(r.violation, 1e-8);
  for (double c : res.coefficients) {
    EXPECT_GE(c, p.lower);
    EXPECT_LE(c, p.upper);
  }
  const auto layers = layer_averages(p.field_counts, res.coefficients, 0);
  for (std::size_t l = 1; l < layers.size(); ++l) EXPECT_LE(layers[l], layers[l - 1] + 1e-12);
  const auto uni = uniform_design_with_mass(p, res.mass);
  EXPECT_NEAR(design_mass(p, uni), res.mass, 1e-12 * res.mass);
  EXPECT_LE(res.compliance, evaluate(p, uni).compliance);

  std::ostringstream csv;
  res.trace.write_csv(csv);
  EXPECT_EQ(csv.str().rfind("iteration,objective,mass", 0), 0u);
}

TEST(Optimize, DeterministicAcrossThreadCounts) {
  const auto lat = small_lattice({3, 2, 1}, Grading::constant_field({3, 2, 2}, 0.45));
  auto p = make_design_problem(lat, 1, inconel, spin_load(), 0.05, 0.45);
  p.mass_budget = 0.5 * design_mass(p, p.initial);
  const auto a = optimize(p);
  thread_count() = 3;
  const auto b = optimize(p);
  thread_count() = 1;
  ASSERT_EQ(a.trace.rows.size(), b.trace.rows.size());
  for (std::size_t i = 0; i < a.trace.rows.size(); ++i) EXPECT_EQ(a.trace.rows[i].objective, b.trace.rows[i].objective);
  EXPECT_EQ(a.coefficients, b.coefficients);
}
