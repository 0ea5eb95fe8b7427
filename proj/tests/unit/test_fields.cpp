#include <cmath>

#include <gtest/gtest.h>

#include "fd_oracle.hpp"
#include "kkharm/fields/field_spec.hpp"
#include "kkharm/fields/oracle.hpp"
#include "kkharm/fields/sampling.hpp"
#include "kkharm/geometry/calculus.hpp"
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

fd::Field as_fn(const Manifold& m, const FieldSpec& f) {
  return [&m, f](const Vector& q) { return evaluate(m, f, q); };
}

struct Case {
  int n;
  FieldSpec field;
};

std::vector<Case> sphere_cases() {
  return {
      {2, FieldSpec::conformal(vec({0, 0, 1}))},
      {3, FieldSpec::conformal(vec({0.3, -0.2, 0.5, 0.9}))},
      {3, FieldSpec::killing({1, 1})},
      {4, FieldSpec::killing({1, 1})},
      {4, FieldSpec::killing({1, 2})},
      {5, FieldSpec::killing({0.7})},
      {5, FieldSpec::quadratic({{1.0, 3}, {0.0, 3}})},
      {4, FieldSpec::quadratic({{1.0, 2}, {0.0, 2}, {-0.5, 1}})},
      {3, FieldSpec::normalized(FieldSpec::killing({1, 2}))},
      {2, FieldSpec::scaled(FieldSpec::conformal(vec({0, 1, 0})), 1.7)},
  };
}

}  // namespace

TEST(Evaluate, Examples) {
  EXPECT_TRUE(evaluate(Manifold::sphere(2), FieldSpec::conformal(vec({0, 0, 1})), vec({1, 0, 0})).isApprox(vec({0, 0, 1})));
  const Vector z = evaluate(Manifold::sphere(5), FieldSpec::quadratic({{1, 3}, {0, 3}}), vec({1, 0, 0, 0, 0, 0}));
  EXPECT_LT(z.norm(), 1e-15);
  EXPECT_TRUE(evaluate(Manifold::sphere(3), FieldSpec::killing({1, 1}), vec({1, 0, 0, 0})).isApprox(vec({0, 1, 0, 0})));
}

TEST(Evaluate, HopfMatchesAmbientFormula) {
  const Manifold s3 = Manifold::sphere(3);
  Rng rng(4);
  for (int i = 0; i < 10; ++i) {
    const Vector x = rng.unit_vector(4);
    const Vector xi = vec({-x[1], x[0], -x[3], x[2]});
    EXPECT_LT((evaluate(s3, FieldSpec::killing({1, 1}), x) - xi).norm(), 1e-15);
  }
}

TEST(Evaluate, NormalizationNearZeroIsADomainError) {
  const Manifold s2 = Manifold::sphere(2);
  EXPECT_THROW(evaluate(s2, FieldSpec::normalized(FieldSpec::conformal(vec({0, 0, 1}))), vec({0, 0, 1})), DomainError);
}

TEST(Compatibility, MismatchedFieldsAreRejected) {
  EXPECT_THROW(require_compatible(Manifold::sphere(2), FieldSpec::killing({1, 1})), InvalidInput);
  EXPECT_THROW(require_compatible(Manifold::sphere(2), FieldSpec::parallel(vec({1, 0}))), InvalidInput);
  EXPECT_THROW(require_compatible(Manifold::flat_torus(1, 1), FieldSpec::conformal(vec({0, 0, 1}))), InvalidInput);
  EXPECT_NO_THROW(require_compatible(Manifold::sphere(3), FieldSpec::killing({1, 1})));
}

TEST(AxisInfo, Examples) {
  const AxisInfo a = axis_info({1, 1}, 5);
  EXPECT_EQ(a.dim, 1);
  EXPECT_EQ(a.k, 0);
  EXPECT_EQ(a.p, 2);
  EXPECT_FALSE(a.maximal);
  const AxisInfo b = axis_info({1}, 5);
  EXPECT_EQ(b.dim, 3);
  EXPECT_EQ(b.k, 1);
  EXPECT_TRUE(b.maximal);
  const AxisInfo c = axis_info({1, 1}, 4);
  EXPECT_EQ(c.dim, 0);
  EXPECT_EQ(c.k, 0);
}

TEST(FieldCalculus, ConformalExample) {
  const Manifold s2 = Manifold::sphere(2);
  const double r = 1 / std::sqrt(2.0);
  const Vector p = vec({r, 0, r});
  const FieldCalculus c = field_calculus(s2, FieldSpec::conformal(vec({0, 0, 1})), p);
  EXPECT_NEAR(c.norm_sq, 0.5, 1e-15);
  EXPECT_LT((c.rough_laplacian - c.value).norm(), 1e-14);
  EXPECT_NEAR(c.divergence, -std::sqrt(2.0), 1e-14);
  EXPECT_NEAR(c.jacobian_norm_sq, 1.0, 1e-14);
  // nabla_X sigma = -lambda X.
  const Vector x = vec({-r, 0.5, r});
  const Vector t = s2.tangent_project(p, x);
  EXPECT_LT((covariant_derivative(s2, FieldSpec::conformal(vec({0, 0, 1})), {p, t}) + r * t).norm(), 1e-14);
}

TEST(FieldCalculus, HopfExample) {
  const Manifold s3 = Manifold::sphere(3);
  const FieldSpec hopf = FieldSpec::killing({1, 1});
  EXPECT_TRUE(covariant_derivative(s3, hopf, {vec({1, 0, 0, 0}), vec({0, 0, 1, 0})}).isApprox(vec({0, 0, 0, 1})));
  Rng rng(8);
  for (int i = 0; i < 10; ++i) {
    const Vector p = rng.unit_vector(4);
    const FieldCalculus c = field_calculus(s3, hopf, p);
    EXPECT_NEAR(c.norm_sq, 1.0, 1e-14);
    EXPECT_NEAR(c.jacobian_norm_sq, 2.0, 1e-13);
    EXPECT_NEAR(c.divergence, 0.0, 1e-14);
    EXPECT_LT((c.rough_laplacian - 2 * c.value).norm(), 1e-13);
  }
}

TEST(FieldCalculus, ParallelOnFlatTorus) {
  const Manifold t = Manifold::flat_torus(2, 3);
  const FieldCalculus c = field_calculus(t, FieldSpec::parallel(vec({0.6, 0.8})), vec({0.5, 1.0}));
  EXPECT_DOUBLE_EQ(c.norm_sq, 1.0);
  EXPECT_DOUBLE_EQ(c.jacobian_norm_sq, 0.0);
  EXPECT_DOUBLE_EQ(c.rough_laplacian.norm(), 0.0);
  EXPECT_DOUBLE_EQ(c.divergence, 0.0);
}

TEST(FieldCalculus, AnalyticAgreesWithFiniteDifferenceOracle) {
  Rng rng(12);
  for (const Case& k : sphere_cases()) {
    const Manifold m = Manifold::sphere(k.n);
    const auto pts = sample_points(m, &k.field, 5, rng, 0.1);
    for (const Vector& p : pts) {
      const FieldCalculus c = field_calculus(m, k.field, p);
      const fd::Field sigma = as_fn(m, k.field);
      EXPECT_LT((c.rough_laplacian - fd::sphere_rough_laplacian(sigma, p)).norm(), 1e-5) << k.field.id();
      const Matrix b = fd::tangent_basis(p);
      for (int i = 0; i < b.cols(); ++i) {
        const Vector x = b.col(i);
        EXPECT_LT((c.derivative_along(m, x) - fd::sphere_covariant(sigma, p, x)).norm(), 1e-8) << k.field.id();
      }
    }
  }
}

TEST(FieldCalculus, StencilPathAgreesWithAnalytic) {
  Rng rng(13);
  for (const Case& k : sphere_cases()) {
    const Manifold m = Manifold::sphere(k.n);
    for (const Vector& p : sample_points(m, &k.field, 3, rng, 0.1)) {
      const FieldCalculus a = field_calculus(m, k.field, p);
      const FieldCalculus s = field_calculus(m, k.field, p, CalculusPath::kStencil);
      EXPECT_LT((a.rough_laplacian - s.rough_laplacian).norm(), 1e-4) << k.field.id();
      EXPECT_NEAR(a.divergence, s.divergence, 1e-6) << k.field.id();
      EXPECT_NEAR(a.jacobian_norm_sq, s.jacobian_norm_sq, 1e-6) << k.field.id();
    }
  }
}

TEST(ClosedFormOracle, AgreesWithFieldCalculus) {
  Rng rng(14);
  for (const Case& k : sphere_cases()) {
    const Manifold m = Manifold::sphere(k.n);
    if (k.field.get_if<FieldSpec::Normalized>() || k.field.get_if<FieldSpec::Scaled>()) continue;
    for (const Vector& p : sample_points(m, &k.field, 5, rng)) {
      const FieldCalculus a = field_calculus(m, k.field, p);
      const FieldCalculus o = closed_form_oracle(m, k.field, p);
      EXPECT_LT((a.rough_laplacian - o.rough_laplacian).norm(), 1e-12) << k.field.id();
      EXPECT_LT((a.grad_half_norm - o.grad_half_norm).norm(), 1e-12) << k.field.id();
      EXPECT_NEAR(a.jacobian_norm_sq, o.jacobian_norm_sq, 1e-12) << k.field.id();
      EXPECT_NEAR(a.divergence, o.divergence, 1e-12) << k.field.id();
    }
  }
}

TEST(ClosedFormOracle, QuadraticTwoEigenvalueExample) {
  // mu = 1, n = 5, |x_mu|^2 = 1/2: |sigma|^2 = 1/4.
  const Manifold s5 = Manifold::sphere(5);
  const double r = 0.5;
  const Vector p = vec({r, r, 0, r, r, 0});
  const FieldSpec q = FieldSpec::quadratic({{1.0, 3}, {0.0, 3}});
  const FieldCalculus o = closed_form_oracle(s5, q, p);
  EXPECT_NEAR(o.norm_sq, 0.25, 1e-15);
  EXPECT_LT((o.rough_laplacian - 8 * o.value).norm(), 1e-14);
}

TEST(ClosedFormOracle, UnsupportedKinds) {
  const Manifold t = Manifold::flat_torus(1, 1);
  EXPECT_THROW(closed_form_oracle(t, FieldSpec::fourier({{0, 1.0, 1, 0, 0.0}}), vec({0.1, 0.2})), Unsupported);
}

TEST(Sampling, RespectsNormFloorAndIsReproducible) {
  const Manifold s2 = Manifold::sphere(2);
  const FieldSpec f = FieldSpec::normalized(FieldSpec::conformal(vec({0, 0, 1})));
  Rng a(5), b(5);
  const auto pa = sample_points(s2, &f, 50, a, 0.2);
  const auto pb = sample_points(s2, &f, 50, b, 0.2);
  ASSERT_EQ(pa.size(), 50u);
  for (std::size_t i = 0; i < pa.size(); ++i) {
    EXPECT_EQ(pa[i], pb[i]);
    EXPECT_GT(std::sqrt(1 - pa[i][2] * pa[i][2]), 0.2 - 1e-12);
  }
}

TEST(SupNorm, Catalog) {
  EXPECT_NEAR(sup_norm_sq(Manifold::sphere(2), FieldSpec::conformal(vec({0, 0, 2}))), 4.0, 1e-14);
  EXPECT_NEAR(sup_norm_sq(Manifold::sphere(4), FieldSpec::killing({1, 2})), 4.0, 1e-14);
  EXPECT_NEAR(sup_norm_sq(Manifold::sphere(5), FieldSpec::quadratic({{1.0, 3}, {0.0, 3}})), 0.25, 1e-14);
}
