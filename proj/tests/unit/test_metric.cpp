#include <cmath>

#include <gtest/gtest.h>

#include "kkharm/metric/kk_metric.hpp"
#include "kkharm/metric/koszul.hpp"
#include "kkharm/metric/profile.hpp"
#include "kkharm/util/errors.hpp"
#include "kkharm/util/random.hpp"

using namespace kkharm;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<int>(xs.size()));
  int i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

KKMetricSpec exp_metric(double rate) {
  KKMetricSpec s;
  s.name = "exp";
  s.B = ScalarProfile::exponential(1.0, rate);
  return s;
}

}  // namespace

TEST(Profile, DerivativesMatchCentralDifferences) {
  const std::vector<ScalarProfile> ps = {
      ScalarProfile::constant(2.0),
      ScalarProfile::exponential(1.5, -0.7),
      ScalarProfile::power(2.0, 1.0, 1.0, -1.25),
      ScalarProfile::linear(1.0, 0.5),
      ScalarProfile::exponential(1.0, -1.0) + ScalarProfile::linear(0.2, 0.1),
  };
  for (const auto& p : ps) {
    for (double t : {0.0, 0.3, 1.0, 1.7}) {
      const double h = 1e-5;
      const double fd = (p.value(t + h) - p.value(t - h)) / (2 * h);
      EXPECT_NEAR(p.derivative(t), fd, 1e-8) << p.describe() << " at " << t;
    }
  }
  EXPECT_THROW(ScalarProfile::power(1.0, 1.0, -1.0, 2.0).value(1.5), DomainError);
}

TEST(Profile, ExtensionIsContinuouslyDifferentiable) {
  const ScalarProfile inner = ScalarProfile::power(1.0, 2.0, -1.0, 3.0);  // (2 - t)^3, zero at 2
  const ScalarProfile ext = ScalarProfile::extended(inner, 1.0);
  EXPECT_DOUBLE_EQ(ext.value(0.5), inner.value(0.5));
  EXPECT_NEAR(ext.value(1.0 + 1e-9), inner.value(1.0), 1e-8);
  EXPECT_NEAR(ext.derivative(1.0 + 1e-9), inner.derivative(1.0), 1e-7);
  for (double t : {1.5, 2.0, 5.0}) EXPECT_GT(ext.value(t), 0.0);
}

TEST(Profile, TabulatedInterpolatesHermiteData) {
  // Cubic data are reproduced exactly by Hermite interpolation.
  auto f = [](double t) { return 1 + t - 0.5 * t * t + 0.1 * t * t * t; };
  auto df = [](double t) { return 1 - t + 0.3 * t * t; };
  std::vector<double> v, d;
  for (int i = 0; i <= 10; ++i) {
    v.push_back(f(0.1 * i));
    d.push_back(df(0.1 * i));
  }
  const ScalarProfile p = ScalarProfile::tabulated(0.0, 0.1, v, d);
  for (double t : {0.0, 0.05, 0.333, 0.99}) {
    EXPECT_NEAR(p.value(t), f(t), 1e-13);
    EXPECT_NEAR(p.derivative(t), df(t), 1e-12);
  }
  EXPECT_THROW(p.value(1.5), DomainError);
}

TEST(Presets, Examples) {
  const KKMetricSpec s = preset("sasaki");
  EXPECT_DOUBLE_EQ(s.A.value(0.7), 1.0);
  EXPECT_DOUBLE_EQ(s.B.value(0.7), 1.0);
  EXPECT_DOUBLE_EQ(s.C.value(0.7), 0.0);
  const KKMetricSpec g20 = preset("g_mr", {{"m", 2}, {"r", 0}});
  EXPECT_NEAR(g20.B.value(0.5), std::pow(1.5, -2), 1e-15);
  EXPECT_NEAR(g20.C.value(0.5), 0.0, 1e-15);
  const KKMetricSpec cg = preset("cheeger-gromoll");
  EXPECT_NEAR(cg.B.value(0.5), 1 / 1.5, 1e-15);
  EXPECT_NEAR(cg.C.value(0.5), 1 / 1.5, 1e-15);
  EXPECT_THROW(preset("nope"), InvalidInput);
  EXPECT_THROW(preset("g_mr", {{"m", 1}}), InvalidInput);
}

TEST(Validate, Examples) {
  KKMetricSpec s = preset("sasaki");
  s.t_max = 4;
  const ValidationReport ok = validate(s);
  EXPECT_TRUE(ok.ok);
  EXPECT_DOUBLE_EQ(ok.min_A, 1.0);
  EXPECT_DOUBLE_EQ(ok.min_B, 1.0);
  EXPECT_DOUBLE_EQ(ok.min_radial, 1.0);

  KKMetricSpec lin;
  lin.B = ScalarProfile::linear(1.0, -1.0);
  lin.t_max = 2;
  const ValidationReport bad = validate(lin);
  EXPECT_FALSE(bad.ok);
  ASSERT_TRUE(bad.failure_t.has_value());
  EXPECT_NEAR(*bad.failure_t, 1.0, 2e-3);

  KKMetricSpec rad;
  rad.B = ScalarProfile::exponential(1.0, -1.0);
  rad.C = ScalarProfile::exponential(-0.5, -1.0);
  rad.t_max = 4;
  const ValidationReport r = validate(rad);
  EXPECT_FALSE(r.ok);
  ASSERT_TRUE(r.failure_t.has_value());
  EXPECT_NEAR(*r.failure_t, 2.0, 2e-3);
}

TEST(Validate, CheckedProfilesThrowsOnDegeneracy) {
  KKMetricSpec lin;
  lin.B = ScalarProfile::linear(1.0, -1.0);
  EXPECT_NO_THROW(checked_profiles(lin, 0.5));
  EXPECT_THROW(checked_profiles(lin, 1.5), MetricDegeneracy);
}

TEST(MetricOnLifts, Examples) {
  const Manifold s2 = Manifold::sphere(2);
  const Vector p = vec({0, 0, 1}), e = vec({1, 0, 0});
  const Vector x = vec({0.3, -0.4, 0}), y = vec({1, 2, 0});
  const KKMetricSpec sas = preset("sasaki");
  const LiftPair u{p, e, x, y}, w{p, e, y, x};
  EXPECT_NEAR(metric_on_lifts(sas, s2, u, w), x.dot(y) + y.dot(x), 1e-15);

  const KKMetricSpec b = exp_metric(-1.0);
  const Vector unit_orth = vec({0, 1, 0});
  const LiftPair xv = vertical_lift(p, e, unit_orth);
  EXPECT_NEAR(metric_on_lifts(b, s2, xv, xv), std::exp(-1.0), 1e-15);

  const KKMetricSpec cg = preset("cheeger-gromoll");
  EXPECT_DOUBLE_EQ(metric_on_lifts(cg, s2, horizontal_lift(p, e, x), vertical_lift(p, e, y)), 0.0);
  // Along e the vertical block is B + tC.
  const LiftPair ev = vertical_lift(p, e, e);
  EXPECT_NEAR(metric_on_lifts(cg, s2, ev, ev), 0.5 + 0.5, 1e-15);
}

TEST(Connection, SasakiHorizontalExample) {
  const Manifold s2 = Manifold::sphere(2);
  const Vector p = vec({0, 0, 1}), x = vec({1, 0, 0}), e = vec({0, 1, 0});
  const Vector nabla = vec({0, 0.25, 0});
  const LiftPair r = connection_eval(preset("sasaki"), s2, p, e, LiftCase::kHH, x, x, nabla);
  EXPECT_TRUE(r.horizontal.isApprox(nabla));
  EXPECT_LT(r.vertical.norm(), 1e-15);
}

TEST(Connection, FibresAreTotallyGeodesic) {
  const Manifold s3 = Manifold::sphere(3);
  Rng rng(2);
  KKMetricSpec general;
  general.A = ScalarProfile::linear(1.0, 0.4);
  general.B = ScalarProfile::exponential(1.0, -0.5);
  general.C = ScalarProfile::linear(0.2, 0.1);
  for (const auto& spec : {preset("cheeger-gromoll"), general}) {
    for (int k = 0; k < 10; ++k) {
      const Vector p = rng.unit_vector(4);
      auto tangent = [&] { return s3.tangent_project(p, rng.normal_vector(4)); };
      const Vector e = tangent(), x = tangent(), y = tangent();
      const LiftPair r = connection_eval(spec, s3, p, e, LiftCase::kVV, x, y, Vector::Zero(4));
      EXPECT_LT(r.horizontal.norm(), 1e-15);
    }
  }
}

TEST(Connection, LiftCaseParsing) {
  EXPECT_EQ(parse_lift_case("hh"), LiftCase::kHH);
  EXPECT_EQ(parse_lift_case("vh"), LiftCase::kVH);
  EXPECT_THROW(parse_lift_case("xx"), InvalidInput);
}

TEST(Koszul, LeviCivitaOnS3) {
  KKMetricSpec general;
  general.name = "general";
  general.A = ScalarProfile::linear(1.0, 0.4);
  general.B = ScalarProfile::exponential(1.0, -0.5);
  general.C = ScalarProfile::linear(0.2, 0.1);
  for (const auto& spec : {preset("sasaki"), preset("cheeger-gromoll"), preset("g_mr", {{"m", 2}, {"r", 0}}), general}) {
    const KoszulReport r = koszul_residuals(spec, 3, 20, 99);
    EXPECT_EQ(r.samples, 20);
    EXPECT_LT(r.metric_residual, 1e-6) << spec.name;
    EXPECT_LT(r.torsion_residual, 1e-6) << spec.name;
  }
}
