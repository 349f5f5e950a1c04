#include "glat/spline/compose.hpp"
#include "glat/spline/fitting.hpp"
#include "glat/spline/geometry.hpp"
#include "glat/spline/offset.hpp"
#include "glat/spline/spline_io.hpp"

#include <gtest/gtest.h>

#include <random>
#include <sstream>

using namespace glat;

namespace {

std::mt19937 rng(1234);

double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }

KnotVector random_knots(int degree, int count) {
  std::vector<double> k(degree + 1, 0.0);
  std::vector<double> inner;
  for (int i = 0; i < count - degree - 1; ++i) inner.push_back(uniform(0.0, 1.0));
  std::sort(inner.begin(), inner.end());
  k.insert(k.end(), inner.begin(), inner.end());
  k.insert(k.end(), degree + 1, 1.0);
  return KnotVector(degree, k);
}

SplineVolume random_volume(int degree, int count, bool rational = false) {
  std::array<KnotVector, 3> kv{random_knots(degree, count), random_knots(degree, count), random_knots(degree, count)};
  std::vector<Vec3> ctrl;
  std::vector<double> w;
  for (int k = 0; k < count; ++k)
    for (int j = 0; j < count; ++j)
      for (int i = 0; i < count; ++i) {
        ctrl.push_back(Vec3(double(i) / (count - 1), double(j) / (count - 1), double(k) / (count - 1)) +
                       0.05 * Vec3(uniform(-1, 1), uniform(-1, 1), uniform(-1, 1)));
        if (rational) w.push_back(uniform(0.5, 2.0));
      }
  return SplineVolume(kv, ctrl, w);
}

// Cox-de Boor by direct recursion, independent of KnotVector::basis.
double cox_de_boor(const std::vector<double>& U, int i, int p, double u) {
  if (p == 0) {
    const double last = U.back();
    if (u == last) return (U[i] < u && u <= U[i + 1]) || (U[i] <= u && U[i + 1] == last && U[i] < last) ? 1.0 : 0.0;
    return (U[i] <= u && u < U[i + 1]) ? 1.0 : 0.0;
  }
  double a = 0.0, b = 0.0;
  if (U[i + p] > U[i]) a = (u - U[i]) / (U[i + p] - U[i]) * cox_de_boor(U, i, p - 1, u);
  if (U[i + p + 1] > U[i + 1]) b = (U[i + p + 1] - u) / (U[i + p + 1] - U[i + 1]) * cox_de_boor(U, i + 1, p - 1, u);
  return a + b;
}

Vec3 naive_eval(const SplineVolume& v, double u, double s, double t) {
  Vec3 num = Vec3::Zero();
  double den = 0.0;
  for (int k = 0; k < v.count(2); ++k)
    for (int j = 0; j < v.count(1); ++j)
      for (int i = 0; i < v.count(0); ++i) {
        const double b = cox_de_boor(v.knots(0).knots(), i, v.degree(0), u) *
                         cox_de_boor(v.knots(1).knots(), j, v.degree(1), s) *
                         cox_de_boor(v.knots(2).knots(), k, v.degree(2), t);
        const auto idx = v.index({i, j, k});
        num += b * v.weight(idx) * v.control()[idx];
        den += b * v.weight(idx);
      }
  return num / den;
}

// Rational patch of the sphere of radius r: latitude -45..45 deg, longitude 0..90 deg.
// u runs around, v along the meridian, so the u x v normal points outward.
SplineSurface sphere_patch(double r) {
  const double c = std::sqrt(0.5);
  const double mr[3] = {r * c, r / c, r * c}, mz[3] = {-r * c, 0.0, r * c}, mw[3] = {1.0, c, 1.0};
  const double ang[3] = {0.0, kPi / 4, kPi / 2}, aw[3] = {1.0, c, 1.0};
  std::vector<Vec3> ctrl;
  std::vector<double> w;
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < 3; ++i) {
      const double rad = mr[j] * (i == 1 ? 1.0 / c : 1.0);
      ctrl.push_back(Vec3(rad * std::cos(ang[i]), rad * std::sin(ang[i]), mz[j]));
      w.push_back(aw[i] * mw[j]);
    }
  return SplineSurface({KnotVector::bezier(2), KnotVector::bezier(2)}, ctrl, w);
}

}  // namespace

TEST(KnotVector, LinearHatAtMidpoint) {
  KnotVector kv(1, {0, 0, 1, 1});
  auto b = kv.eval_basis(0.5);
  ASSERT_EQ(b.size(), 2u);
  EXPECT_DOUBLE_EQ(b[0].second, 0.5);
  EXPECT_DOUBLE_EQ(b[1].second, 0.5);
}

TEST(KnotVector, ClampedEndpointInterpolates) {
  auto b = KnotVector::bezier(2).eval_basis(0.0);
  EXPECT_EQ(b[0].first, 0);
  EXPECT_DOUBLE_EQ(b[0].second, 1.0);
  EXPECT_DOUBLE_EQ(b[1].second, 0.0);
  EXPECT_DOUBLE_EQ(b[2].second, 0.0);
}

TEST(KnotVector, PartitionOfUnityAndNonNegativity) {
  for (int trial = 0; trial < 200; ++trial) {
    const int p = trial % 6;
    const auto kv = random_knots(p, p + 1 + trial % 5);
    const double u = uniform(0.0, 1.0);
    double sum = 0.0;
    for (auto [i, v] : kv.eval_basis(u)) {
      EXPECT_GE(v, 0.0);
      sum += v;
    }
    EXPECT_NEAR(sum, 1.0, 1e-12);
  }
}

TEST(KnotVector, RejectsInvalidInput) {
  EXPECT_THROW(KnotVector(1, {0, 0.5, 0.2, 1}), ParameterError);
  EXPECT_THROW(KnotVector(2, {0, 0, 1, 1, 1}), ParameterError);
  EXPECT_THROW(KnotVector::bezier(1).eval_basis(1.5), DomainError);
}

TEST(SplineVolume, IdentityCube) {
  const auto cube = unit_cube();
  EXPECT_TRUE(cube(0.5, 0.5, 0.5).isApprox(Vec3(0.5, 0.5, 0.5)));
  EXPECT_EQ(cube(0.0, 0.0, 0.0), Vec3::Zero());
  EXPECT_TRUE(cube.jacobian({0.3, 0.7, 0.1}).isApprox(Mat3::Identity()));
  const auto scaled = affine_volume(2.0 * Mat3::Identity(), Vec3::Zero());
  EXPECT_TRUE(scaled.jacobian({0.2, 0.4, 0.9}).isApprox(2.0 * Mat3::Identity()));
  EXPECT_THROW(cube(1.1, 0.0, 0.0), DomainError);
}

TEST(SplineVolume, MatchesNaiveSummation) {
  for (bool rational : {false, true}) {
    const auto v = random_volume(3, 6, rational);
    for (int s = 0; s < 50; ++s) {
      const double u = uniform(0, 1), p = uniform(0, 1), t = uniform(0, 1);
      EXPECT_LT((v(u, p, t) - naive_eval(v, u, p, t)).norm(), 1e-12);
    }
  }
}

TEST(SplineVolume, ConvexHullContainment) {
  const auto v = random_volume(2, 5, true);
  const auto box = v.control_bounds();
  for (int s = 0; s < 200; ++s) {
    const Vec3 x = v(uniform(0, 1), uniform(0, 1), uniform(0, 1));
    EXPECT_LT(box.squared_distance(x), 1e-24);
  }
}

TEST(SplineVolume, JacobianMatchesFiniteDifferences) {
  for (bool rational : {false, true}) {
    const auto v = random_volume(3, 5, rational);
    const double h = 1e-6;
    for (int s = 0; s < 30; ++s) {
      SplineVolume::Param t{uniform(0.01, 0.99), uniform(0.01, 0.99), uniform(0.01, 0.99)};
      const auto j = v.jacobian(t);
      for (int d = 0; d < 3; ++d) {
        auto tp = t, tm = t;
        tp[d] += h;
        tm[d] -= h;
        const Vec3 fd = (v.eval(tp) - v.eval(tm)) / (2 * h);
        EXPECT_LT((fd - j.col(d)).norm(), 1e-5 * std::max(1.0, fd.norm()));
      }
    }
  }
}

TEST(Fitting, RecoversTricubic) {
  const auto v = random_volume(3, 6);
  std::array<std::vector<double>, 3> params;
  for (auto& p : params) p = uniform_params(12);
  auto samples = sample_grid<3, 3>(params, [&](const SplineVolume::Param& t) { return v.eval(t); });
  // Uniform knots differ from the random source knots, so recover a uniform cubic first.
  auto first = fit_tricubic(samples, {6, 6, 6});
  auto resampled = sample_grid<3, 3>(params, [&](const SplineVolume::Param& t) { return first.spline.eval(t); });
  auto second = fit_tricubic(resampled, {6, 6, 6});
  const double diag = first.spline.control_bounds().diagonal();
  EXPECT_LT(second.max_residual, 1e-9 * diag);
  for (std::size_t i = 0; i < first.spline.control().size(); ++i)
    EXPECT_LT((first.spline.control()[i] - second.spline.control()[i]).norm(), 1e-9 * diag);
}

TEST(Fitting, TrilinearIsExact) {
  Mat3 a;
  a << 1, 0.2, 0, 0.1, 2, 0.3, 0, 0.4, 0.5;
  const auto lin = trilinear_volume({Vec3(0, 0, 0), Vec3(1, 0.1, 0), Vec3(0, 1, 0.2), Vec3(1.3, 1, 0),
                                     Vec3(0, 0, 1), Vec3(1, 0, 1.1), Vec3(0.1, 1, 1), Vec3(1, 1, 1)});
  std::array<std::vector<double>, 3> params;
  for (auto& p : params) p = uniform_params(9);
  auto fit = fit_tricubic(sample_grid<3, 3>(params, [&](const SplineVolume::Param& t) { return lin.eval(t); }), {4, 4, 4});
  EXPECT_LT(fit.max_residual, 1e-12);
  EXPECT_LT((fit.spline(0.37, 0.61, 0.2) - lin(0.37, 0.61, 0.2)).norm(), 1e-12);
}

TEST(Fitting, RefinementReducesResidual) {
  auto quintic = [](const SplineVolume::Param& t) {
    auto f = [](double x) { return std::pow(x, 5) - 2 * std::pow(x, 4) + std::sin(3 * x); };
    return Vec3(f(t[0]) + t[1], f(t[1]) * t[2], f(t[2]) + t[0] * t[1]);
  };
  std::array<std::vector<double>, 3> params;
  for (auto& p : params) p = uniform_params(30);
  auto samples = sample_grid<3, 3>(params, quintic);
  const double r8 = fit_tricubic(samples, {8, 8, 8}).max_residual;
  const double r12 = fit_tricubic(samples, {12, 12, 12}).max_residual;
  EXPECT_GT(r8, 0.0);
  EXPECT_LT(r12, r8);
}

TEST(Fitting, RejectsUnderdetermined) {
  std::array<std::vector<double>, 3> params{uniform_params(3), uniform_params(8), uniform_params(8)};
  auto samples = sample_grid<3, 3>(params, [](const SplineVolume::Param& t) { return Vec3(t[0], t[1], t[2]); });
  EXPECT_THROW(fit_tricubic(samples, {4, 4, 4}), NumericalError);
}

TEST(Fitting, RejectsSingularSystem) {
  // Eight samples but only three distinct parameter values: rank deficient.
  std::array<std::vector<double>, 3> params{std::vector<double>{0, 0, 0, 0.5, 0.5, 0.5, 1, 1}, uniform_params(8),
                                            uniform_params(8)};
  auto samples = sample_grid<3, 3>(params, [](const SplineVolume::Param& t) { return Vec3(t[0], t[1], t[2]); });
  EXPECT_THROW(fit_tricubic(samples, {4, 4, 4}), NumericalError);
}

TEST(Compose, IdentityTileReproducesMacro) {
  const auto macro = blade_macro();
  auto res = compose(macro, unit_cube());
  EXPECT_LE(res.max_deviation, res.tolerance);
  for (int s = 0; s < 100; ++s) {
    SplineVolume::Param t{uniform(0, 1), uniform(0, 1), uniform(0, 1)};
    EXPECT_LE((res.volume.eval(t) - macro.eval(t)).norm(), res.tolerance);
  }
}

TEST(Compose, AffineMacroIsExact) {
  Mat3 a;
  a << 2, 0.5, 0, 0, 1, 0.25, 0.1, 0, 3;
  const Vec3 b(1, -2, 0.5);
  const auto macro = affine_volume(a, b);
  const auto tile = random_volume(2, 3);
  ComposeOptions opt;
  opt.tolerance = 1e-9;
  std::vector<Vec3> ctrl;
  for (const auto& c : tile.control()) ctrl.push_back(c.cwiseMax(0.0).cwiseMin(1.0));
  const SplineVolume clipped(tile.knot_vectors(), ctrl);
  auto res = compose(macro, clipped, opt);
  for (int s = 0; s < 50; ++s) {
    SplineVolume::Param t{uniform(0, 1), uniform(0, 1), uniform(0, 1)};
    EXPECT_LT((res.volume.eval(t) - (a * clipped.eval(t) + b)).norm(), 1e-9);
  }
}

TEST(Compose, DenseOracleWithinTolerance) {
  auto macro = random_volume(3, 5);
  const auto tile = trilinear_volume({Vec3(0.1, 0.1, 0.1), Vec3(0.9, 0.2, 0.1), Vec3(0.2, 0.8, 0.2), Vec3(0.9, 0.9, 0.1),
                                      Vec3(0.1, 0.2, 0.9), Vec3(0.8, 0.1, 0.9), Vec3(0.1, 0.9, 0.8), Vec3(0.9, 0.8, 0.9)});
  auto res = compose(macro, tile);
  double worst = 0.0;
  for (int i = 0; i < 20; ++i)
    for (int j = 0; j < 20; ++j)
      for (int k = 0; k < 20; ++k) {
        SplineVolume::Param t{(i + 0.5) / 20, (j + 0.5) / 20, (k + 0.5) / 20};
        const Vec3 exact = macro.eval(to_macro_param(macro, tile.eval(t)));
        worst = std::max(worst, (res.volume.eval(t) - exact).norm());
      }
  EXPECT_LE(worst, res.tolerance);
  for (int s = 0; s < 1000; ++s) {
    SplineVolume::Param t{uniform(0, 1), uniform(0, 1), uniform(0, 1)};
    EXPECT_LE((res.volume.eval(t) - macro.eval(to_macro_param(macro, tile.eval(t)))).norm(), res.tolerance);
  }
}

TEST(Compose, EscapingTileIsDomainError) {
  EXPECT_THROW(compose(unit_cube(), box_volume(Vec3(0.5, 0, 0), Vec3(1.5, 1, 1))), DomainError);
}

TEST(Compose, UnmetToleranceReportsAchieved) {
  ComposeOptions opt;
  opt.tolerance = 1e-14;
  opt.max_grid = 5;
  try {
    compose(random_volume(3, 8), unit_cube(), opt);
    FAIL() << "expected ApproximationError";
  } catch (const ApproximationError& e) {
    EXPECT_GT(e.achieved(), 1e-14);
  }
}

TEST(Offset, PlaneTranslates) {
  const SplineSurface plane({KnotVector::bezier(1), KnotVector::bezier(1)},
                            {Vec3(0, 0, 0), Vec3(2, 0, 0), Vec3(0, 3, 0), Vec3(2, 3, 0)});
  auto res = approximate_offset(plane, 1.0);
  EXPECT_LT(res.max_deviation, 1e-9);
  EXPECT_LT((res.surface(0.3, 0.6) - Vec3(0.6, 1.8, 1.0)).norm(), 1e-9);
}

TEST(Offset, SpherePatchGrowsRadius) {
  const auto patch = sphere_patch(2.0);
  EXPECT_NEAR(patch(0.3, 0.7).norm(), 2.0, 1e-12);
  auto res = approximate_offset(patch, 0.5);
  EXPECT_LT(res.max_deviation, 1e-4);
  for (int s = 0; s < 200; ++s) EXPECT_NEAR(res.surface(uniform(0, 1), uniform(0, 1)).norm(), 2.5, 1e-4);
}

TEST(Offset, ZeroDistanceReturnsInput) {
  const auto patch = sphere_patch(2.0);
  EXPECT_TRUE(approximate_offset(patch, 0.0).surface == patch);
}

TEST(Offset, DegenerateNormalThrows) {
  const SplineSurface collapsed({KnotVector::bezier(1), KnotVector::bezier(1)},
                                {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 0, 0), Vec3(1, 0, 0)});
  EXPECT_THROW(approximate_offset(collapsed, 0.1), DegeneracyError);
}

TEST(SplineIo, BitExactRoundTrip) {
  const auto v = random_volume(3, 5, true);
  const auto s = sphere_patch(1.5);
  std::stringstream ss;
  write_spline(ss, v);
  write_spline(ss, blade_macro());
  auto back = read_splines<3, 3>(ss);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_TRUE(back[0] == v);
  EXPECT_TRUE(back[1] == blade_macro());
  std::stringstream ss2;
  write_spline(ss2, s);
  EXPECT_TRUE((read_splines<2, 3>(ss2).at(0) == s));
}

TEST(SplineIo, MillimetreUnitsScale) {
  std::stringstream ss("spline 3 1 1 1 2 2 2\nunits mm\n0 0 1 1\n0 0 1 1\n0 0 1 1\n"
                       "0 0 0\n1000 0 0\n0 1000 0\n1000 1000 0\n0 0 1000\n1000 0 1000\n0 1000 1000\n1000 1000 1000\n");
  auto v = read_splines<3, 3>(ss).at(0);
  EXPECT_TRUE(v(1.0, 1.0, 1.0).isApprox(Vec3(1, 1, 1)));
}

TEST(Geometry, BladeMacroShape) {
  const auto blade = blade_macro();
  EXPECT_EQ(blade.degree(0), 2);
  EXPECT_EQ(blade.count(0), 5);
  EXPECT_NEAR(blade(1.0, 0.5, 0.5).x(), 0.09, 1e-12);
  EXPECT_GT(spline_volume(blade), 0.0);
  for (int s = 0; s < 100; ++s) EXPECT_GT(blade.jacobian({uniform(0, 1), uniform(0, 1), uniform(0, 1)}).determinant(), 0.0);
}
