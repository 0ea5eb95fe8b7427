#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "kkharm/fields/field_spec.hpp"
#include "kkharm/geometry/manifold.hpp"
#include "kkharm/metric/kk_metric.hpp"

namespace kkharm {

enum class ProfileFamily {
  /// sigma = grad of a quadratic form with eigenvalues mu, 0 of equal
  /// multiplicity (n+1)/2 on S^n.
  kQuadratic,
  /// Equal-speed rotation lambda on S^{2p} with invariant axis of dim 2k+1.
  kKillingEven,
  /// Equal-speed rotation lambda on S^{2p+1} with invariant axis of dim 2k.
  kKillingOdd,
  /// Conformal gradient field on S^n with A = B + A0, C = 0.
  kEnlargedConformal,
  /// Killing field on S^{2p} with A = B + A0 (or linear A for unequal speeds).
  kEnlargedKilling,
};

std::string to_string(ProfileFamily f);
ProfileFamily parse_profile_family(const std::string& name);

struct ProfileProblem {
  ProfileFamily family = ProfileFamily::kQuadratic;
  /// Dimension of the sphere.
  int n = 5;
  double mu = 1.0;
  int k = 0;
  double lambda = 1.0;
  double a_sq = 1.0;
  /// Explicit speeds for kEnlargedKilling; empty means lambda on every
  /// rotating plane.
  std::vector<double> thetas;
  ScalarProfile C = ScalarProfile::constant(0.0);
  double K = 1.0;
  double A0 = 1.0;
  /// kKillingOdd with k = 0: use K (1+t)^{-(1+1/lambda^2)} instead of the
  /// exponential.
  bool power_variant = false;

  /// n = 2p or n = 2p + 1.
  int p() const { return n / 2; }
  /// Largest attained |sigma|^2 of the associated field.
  double t_peak() const;
  /// Rotation speeds of the associated Killing field.
  std::vector<double> speeds() const;
  bool unequal_speeds() const;
  std::string describe() const;
};

/// Throws InvalidInput if the parameters do not describe a field of the family.
void require_well_formed(const ProfileProblem& problem);

Manifold problem_manifold(const ProfileProblem& problem);
FieldSpec associated_field(const ProfileProblem& problem);

/// Numeric certificate that no admissible metric exists.
struct Obstruction {
  std::string case_id;
  /// The inequality the proof derives, as text.
  std::string inequality;
  /// Where it is evaluated (t = |sigma|^2, or 0 for speed-only cases).
  double witness_t = 0.0;
  /// Value of the quantity the inequality constrains at the witness.
  double witness_value = 0.0;
  /// How far the inequality is violated; strictly positive for a certificate.
  double margin = 0.0;
  /// Metric the witness was evaluated on, if any.
  std::string metric;
};

struct Feasible {
  std::string reason;
};

using ObstructionOutcome = std::variant<Obstruction, Feasible>;

struct ProfileSolution {
  ProfileProblem problem;
  KKMetricSpec metric;
  double t_peak = 0.0;
  std::string formula;
};

using ProfileOutcome = std::variant<ProfileSolution, Obstruction>;

/// Coefficients of the linear first-order equation a1 B' + a0 B = rhs that a
/// family imposes along t = |sigma|^2 (given C).
struct OdeCoefficients {
  double a1 = 0.0;
  double a0 = 0.0;
  double rhs = 0.0;
};

OdeCoefficients ode_coefficients(const ProfileProblem& problem, double t);

/// Explicit published profiles (C = 0, scale K). Inadmissible parameters
/// return the matching Obstruction, witnessed on the Sasaki metric.
ProfileOutcome closed_form_B(const ProfileProblem& problem);

/// Integrates the family equation for the given C from the closed-form value
/// B(0) with classical RK4 on a 1e-4 grid over [0, t_peak], stores the result
/// as a C^1 Hermite table and continues it beyond t_peak by a positive
/// exponential tail. Throws DomainError if the solution is not positive and
/// InvalidInput for inadmissible problems.
ProfileSolution construct_B_from_C(const ProfileProblem& problem);

/// Max |a1 B' + a0 B - rhs| over [0, t_peak] on a 1e-3 grid offset by half a
/// solver step (so Hermite nodes are not reused). For the constant-norm
/// case (odd, k = 0) only t = lambda^2 is attained and only it is checked.
double ode_residual(const ProfileProblem& problem, const KKMetricSpec& metric);

/// Certificate for a named impossibility case. Recognized ids:
///   quadratic_n3, quadratic_even, quadratic_eigen_structure, conformal,
///   killing_even_maximal, killing_odd_maximal, killing_unequal_even,
///   killing_unequal_odd.
/// Parameters by case: mu; mu; n + eigs (via the field); a_sq; p + lambda;
/// p + lambda; n + thetas; n + thetas. Candidate metrics (default: Sasaki)
/// enter the cases whose inequality involves B and C; the certificate keeps
/// the candidate with the smallest margin.
ObstructionOutcome obstruction_check(const std::string& case_id,
                                     const std::map<std::string, double>& params,
                                     const std::vector<double>& thetas,
                                     const std::vector<KKMetricSpec>& candidates);

/// Obstruction for a general quadratic field: the largest component of
/// nabla_{X(sigma)} sigma orthogonal to sigma over the sample points. It
/// vanishes only for two distinct eigenvalues.
ObstructionOutcome quadratic_structure_check(const Manifold& m, const FieldSpec& field,
                                             const std::vector<Vector>& points);

/// Picks the obstruction case that applies to a problem, if any.
ObstructionOutcome check_problem(const ProfileProblem& problem,
                                 const std::vector<KKMetricSpec>& candidates);

/// A family of candidate metrics for sweeps: B = e^{beta t}, C = c e^{beta t}
/// over a grid of (beta, c), keeping only specs that validate on [0, t_max].
std::vector<KKMetricSpec> candidate_grid(double t_max, double beta_min, double beta_max,
                                         int beta_steps, double c_min, double c_max,
                                         int c_steps);

struct SweepResult {
  int candidates = 0;
  /// min over candidates of (max over points of |tau^v|)
  double min_residual = 0.0;
  std::string best_metric;
};

SweepResult sweep_vertical_residual(const Manifold& m, const FieldSpec& field,
                                    const std::vector<KKMetricSpec>& candidates,
                                    const std::vector<Vector>& points);

}  // namespace kkharm
