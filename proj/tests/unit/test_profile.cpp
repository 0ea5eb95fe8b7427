#include <cmath>

#include <gtest/gtest.h>

#include "kkharm/fields/sampling.hpp"
#include "kkharm/profile/solver.hpp"
#include "kkharm/tension/tension.hpp"
#include "kkharm/util/errors.hpp"
#include "kkharm/util/random.hpp"

using namespace kkharm;

namespace {

ProfileProblem problem(ProfileFamily f, int n) {
  ProfileProblem p;
  p.family = f;
  p.n = n;
  return p;
}

ProfileSolution solution(const ProfileOutcome& o) {
  EXPECT_TRUE(std::holds_alternative<ProfileSolution>(o));
  return std::get<ProfileSolution>(o);
}

// Max |tau^v| of the problem's field over random points.
double vertical_residual(const ProfileProblem& pr, const KKMetricSpec& metric, int samples = 40) {
  const Manifold m = problem_manifold(pr);
  const FieldSpec f = associated_field(pr);
  Rng rng(31);
  double worst = 0.0;
  for (const Vector& p : sample_points(m, &f, samples, rng)) {
    worst = std::max(worst, tension(m, metric, f, p).vertical_norm);
  }
  return worst;
}

// Killing-even ODE written out independently:
// 2 l^2 (p-k-1) B' + (2p-1) B = l^2 [2(p-k) - (2p+1) s] C + l^4 s (1-s) C', s = t / l^2.
double killing_even_defect(int p, int k, double l, const ScalarProfile& B, const ScalarProfile& C, double t) {
  const double s = t / (l * l);
  const double lhs = 2 * l * l * (p - k - 1) * B.derivative(t) + (2 * p - 1) * B.value(t);
  const double rhs = l * l * (2.0 * (p - k) - (2 * p + 1) * s) * C.value(t) + std::pow(l, 4) * s * (1 - s) * C.derivative(t);
  return lhs - rhs;
}

}  // namespace

TEST(ClosedForm, QuadraticS5) {
  ProfileProblem pr = problem(ProfileFamily::kQuadratic, 5);
  pr.mu = 1;
  const ProfileSolution s = solution(closed_form_B(pr));
  for (double t : {0.0, 0.1, 0.25}) EXPECT_NEAR(s.metric.B.value(t), std::exp(-8 * t), 1e-15);
  EXPECT_NEAR(s.t_peak, 0.25, 1e-15);
  EXPECT_LT(vertical_residual(pr, s.metric), 1e-10);
}

TEST(ClosedForm, QuadraticS7PowerLaw) {
  ProfileProblem pr = problem(ProfileFamily::kQuadratic, 7);
  const ProfileSolution s = solution(closed_form_B(pr));
  EXPECT_LT(ode_residual(pr, s.metric), 1e-10);
  EXPECT_LT(vertical_residual(pr, s.metric), 1e-10);
}

TEST(ClosedForm, KillingEven) {
  ProfileProblem pr = problem(ProfileFamily::kKillingEven, 4);
  const ProfileSolution s = solution(closed_form_B(pr));
  for (double t : {0.0, 0.5, 1.0}) EXPECT_NEAR(s.metric.B.value(t), std::exp(-1.5 * t), 1e-15);
  EXPECT_LT(vertical_residual(pr, s.metric), 1e-10);
  // tau^h survives: the norm of the field is not constant.
  const Manifold m = problem_manifold(pr);
  const FieldSpec f = associated_field(pr);
  Rng rng(3);
  double h = 0.0;
  for (const Vector& p : sample_points(m, &f, 40, rng)) h = std::max(h, tension(m, s.metric, f, p).horizontal_norm);
  EXPECT_GT(h, 1e-3);
}

TEST(ClosedForm, KillingOdd) {
  ProfileProblem pr = problem(ProfileFamily::kKillingOdd, 3);
  const ProfileSolution s = solution(closed_form_B(pr));
  for (double t : {0.0, 0.5, 1.0}) EXPECT_NEAR(s.metric.B.value(t), std::exp(-t), 1e-15);
  EXPECT_NEAR(constant_norm_condition(s.metric.B, 1.0), 0.0, 1e-15);

  ProfileProblem p5 = problem(ProfileFamily::kKillingOdd, 5);
  p5.k = 1;
  const ProfileSolution s5 = solution(closed_form_B(p5));
  for (double t : {0.0, 0.5, 1.0}) EXPECT_NEAR(s5.metric.B.value(t), std::exp(-2 * t), 1e-15);
  EXPECT_LT(vertical_residual(p5, s5.metric), 1e-10);
}

TEST(ClosedForm, KillingOddPowerVariant) {
  ProfileProblem pr = problem(ProfileFamily::kKillingOdd, 3);
  pr.lambda = 2.0;
  pr.power_variant = true;
  const ProfileSolution s = solution(closed_form_B(pr));
  EXPECT_NEAR(s.metric.B.value(1.0), std::pow(2.0, -1.25), 1e-14);
  EXPECT_NEAR(constant_norm_condition(s.metric.B, 2.0), 0.0, 1e-14);
}

TEST(ClosedForm, EnlargedConformal) {
  ProfileProblem s2 = problem(ProfileFamily::kEnlargedConformal, 2);
  const ProfileSolution a = solution(closed_form_B(s2));
  for (double t : {0.0, 0.5, 1.0}) EXPECT_NEAR(a.metric.B.value(t), std::exp(-0.5 * t), 1e-15);
  EXPECT_NEAR(a.metric.A.value(0.3), a.metric.B.value(0.3) + s2.A0, 1e-15);
  const Manifold m2 = problem_manifold(s2);
  const FieldSpec f2 = associated_field(s2);
  Rng rng(4);
  for (const Vector& p : sample_points(m2, &f2, 30, rng)) EXPECT_LT(tension(m2, a.metric, f2, p).norm_G, 1e-10);

  ProfileProblem s4 = problem(ProfileFamily::kEnlargedConformal, 4);
  const ProfileSolution b = solution(closed_form_B(s4));
  EXPECT_LT(vertical_residual(s4, b.metric), 1e-10);
  const Manifold m4 = problem_manifold(s4);
  const FieldSpec f4 = associated_field(s4);
  double h = 0.0;
  for (const Vector& p : sample_points(m4, &f4, 40, rng)) h = std::max(h, tension(m4, b.metric, f4, p).horizontal_norm);
  EXPECT_GT(h, 1e-3);
}

TEST(ClosedForm, InadmissibleParametersGiveObstructions) {
  ProfileProblem n3 = problem(ProfileFamily::kQuadratic, 3);
  EXPECT_TRUE(std::holds_alternative<Obstruction>(closed_form_B(n3)));
  ProfileProblem maximal = problem(ProfileFamily::kKillingEven, 4);
  maximal.k = 1;
  EXPECT_TRUE(std::holds_alternative<Obstruction>(closed_form_B(maximal)));
}

TEST(Construct, RecoversClosedFormWhenCIsZero) {
  ProfileProblem pr = problem(ProfileFamily::kQuadratic, 5);
  const ProfileSolution s = construct_B_from_C(pr);
  for (double t = 0.0; t <= 0.25; t += 0.01) EXPECT_NEAR(s.metric.B.value(t), std::exp(-8 * t), 1e-9);
}

TEST(Construct, KillingEvenWithNonzeroC) {
  ProfileProblem pr = problem(ProfileFamily::kKillingEven, 4);
  pr.C = ScalarProfile::constant(0.1);
  const ProfileSolution s = construct_B_from_C(pr);
  double worst = 0.0;
  for (int i = 0; i <= 997; ++i) {
    const double t = 1e-3 * i + 5e-4;
    worst = std::max(worst, std::abs(killing_even_defect(2, 0, 1.0, s.metric.B, pr.C, t)));
  }
  EXPECT_LT(worst, 1e-8);
  EXPECT_LT(ode_residual(pr, s.metric), 1e-8);
  EXPECT_LT(vertical_residual(pr, s.metric), 1e-6);
}

TEST(Construct, KillingOddIsExponential) {
  ProfileProblem pr = problem(ProfileFamily::kKillingOdd, 5);
  pr.k = 1;
  const ProfileSolution s = construct_B_from_C(pr);
  for (double t : {0.0, 0.4, 0.9}) EXPECT_NEAR(s.metric.B.value(t), std::exp(-2 * t), 1e-9);
}

TEST(Construct, RejectsInadmissible) {
  EXPECT_THROW(construct_B_from_C(problem(ProfileFamily::kQuadratic, 3)), InvalidInput);
}

TEST(Ode, CoefficientsMatchHandDerivation) {
  ProfileProblem pr = problem(ProfileFamily::kKillingEven, 6);
  pr.k = 1;
  pr.lambda = 1.3;
  pr.C = ScalarProfile::linear(0.2, 0.05);
  for (double t : {0.1, 0.7}) {
    const OdeCoefficients c = ode_coefficients(pr, t);
    const double l2 = 1.69, s = t / l2;
    EXPECT_NEAR(c.a1, 2 * l2 * (3 - 1 - 1), 1e-14);
    EXPECT_NEAR(c.a0, 5.0, 1e-14);
    EXPECT_NEAR(c.rhs, l2 * (2.0 * 2 - 7 * s) * pr.C.value(t) + l2 * l2 * s * (1 - s) * 0.05, 1e-13);
  }
}

TEST(Obstruction, Examples) {
  const auto n3 = obstruction_check("quadratic_n3", {{"mu", 1.0}}, {}, {});
  ASSERT_TRUE(std::holds_alternative<Obstruction>(n3));
  EXPECT_NEAR(std::get<Obstruction>(n3).witness_t, 0.25, 1e-15);
  EXPECT_GT(std::get<Obstruction>(n3).margin, 1e-6);

  const auto conf = obstruction_check("conformal", {{"a_sq", 1.0}}, {}, {preset("sasaki")});
  ASSERT_TRUE(std::holds_alternative<Obstruction>(conf));
  EXPECT_NEAR(std::get<Obstruction>(conf).witness_value, 1.0, 1e-15);

  const auto unequal = obstruction_check("killing_unequal_even", {{"n", 4.0}}, {1.0, 2.0}, {});
  ASSERT_TRUE(std::holds_alternative<Obstruction>(unequal));
  EXPECT_NEAR(std::get<Obstruction>(unequal).witness_value, -5.0, 1e-14);

  const auto equal = obstruction_check("killing_unequal_even", {{"n", 4.0}}, {1.0, 1.0}, {});
  EXPECT_TRUE(std::holds_alternative<Feasible>(equal));
  EXPECT_THROW(obstruction_check("nope", {}, {}, {}), InvalidInput);
}

TEST(Obstruction, QuadraticEigenStructure) {
  Rng rng(6);
  const Manifold s4 = Manifold::sphere(4);
  const FieldSpec two = FieldSpec::quadratic({{1.0, 2}, {0.0, 3}});
  const FieldSpec three = FieldSpec::quadratic({{1.0, 2}, {0.0, 2}, {-0.5, 1}});
  EXPECT_TRUE(std::holds_alternative<Feasible>(quadratic_structure_check(s4, two, sample_points(s4, &two, 30, rng))));
  EXPECT_TRUE(std::holds_alternative<Obstruction>(quadratic_structure_check(s4, three, sample_points(s4, &three, 30, rng))));
}

TEST(Sweep, EvenQuadraticHasNoHarmonicCandidate) {
  const Manifold s4 = Manifold::sphere(4);
  const FieldSpec f = FieldSpec::quadratic({{1.0, 2}, {0.0, 3}});
  const auto grid = candidate_grid(2.0, -4, 2, 7, 0, 2, 5);
  EXPECT_EQ(grid.size(), 35u);
  Rng rng(7);
  const SweepResult r = sweep_vertical_residual(s4, f, grid, sample_points(s4, &f, 50, rng));
  EXPECT_EQ(r.candidates, 35);
  EXPECT_GT(r.min_residual, 1e-6);
}
