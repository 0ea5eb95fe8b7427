#include "kkharm/profile/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "kkharm/fields/oracle.hpp"
#include "kkharm/geometry/calculus.hpp"
#include "kkharm/tension/tension.hpp"
#include "kkharm/util/errors.hpp"

namespace kkharm {
namespace {

constexpr double kSolverStep = 1e-4;
constexpr double kResidualGrid = 1e-3;

std::string num(double x) {
  std::ostringstream os;
  os.precision(12);
  os << x;
  return os.str();
}

double param(const std::map<std::string, double>& params, const std::string& key) {
  const auto it = params.find(key);
  if (it == params.end()) throw InvalidInput("obstruction parameter '" + key + "' is required");
  return it->second;
}

std::vector<KKMetricSpec> valid_candidates(const std::vector<KKMetricSpec>& candidates) {
  if (candidates.empty()) return {preset("sasaki")};
  std::vector<KKMetricSpec> out;
  for (const auto& c : candidates) {
    if (validate(c).ok) out.push_back(c);
  }
  return out;
}

// Obstruction of the form factor * (B + tC)(t) = 0 at a fixed t: keeps the
// candidate with the smallest (positive) margin.
ObstructionOutcome radial_obstruction(const std::string& id, const std::string& inequality,
                                      double t, double factor,
                                      const std::vector<KKMetricSpec>& candidates) {
  const auto specs = valid_candidates(candidates);
  if (specs.empty()) return Feasible{"no candidate metric is positive definite"};
  Obstruction best;
  best.margin = INFINITY;
  for (const auto& s : specs) {
    const ProfileValues v = evaluate_profiles(s, t);
    const double value = factor * v.radial();
    if (value < best.margin) {
      best = {id, inequality, t, value, value, s.name};
    }
  }
  return best;
}

std::vector<double> repeated(double value, int count) {
  return std::vector<double>(std::max(count, 0), value);
}

// lhs - rhs of the family equation evaluated on the actual profiles.
double family_equation(const ProfileProblem& pr, const ProfileValues& v) {
  const double t = v.t;
  const int n = pr.n, p = pr.p(), k = pr.k;
  const double l2 = pr.lambda * pr.lambda, s = t / l2;
  switch (pr.family) {
    case ProfileFamily::kQuadratic: {
      const double mu2 = pr.mu * pr.mu;
      return (n + 3) * v.B + (0.5 * (n - 3) * mu2 - (n - 5) * t) * v.dB -
             (t * (mu2 - 4 * t) * v.dC + (0.5 * (n + 1) * mu2 - 2.0 * (n + 3) * t) * v.C);
    }
    case ProfileFamily::kKillingEven:
      return 2 * l2 * (p - k - 1) * v.dB + (2 * p - 1) * v.B -
             (l2 * (2.0 * (p - k) - (2 * p + 1) * s) * v.C + l2 * l2 * s * (1 - s) * v.dC);
    case ProfileFamily::kKillingOdd:
      return l2 * (p - k) * v.dB + p * v.B -
             (l2 * ((p + 1 - k) - (p + 1) * s) * v.C + 0.5 * l2 * l2 * s * (1 - s) * v.dC);
    case ProfileFamily::kEnlargedConformal: {
      const double lam2 = pr.a_sq - t;
      return v.B + (n - 2) * lam2 * v.dB + n * v.dA -
             (lam2 * t * v.dC + (n * lam2 - t) * v.C);
    }
    case ProfileFamily::kEnlargedKilling:
      if (pr.unequal_speeds()) {
        // Each plane gives its own equation; with B constant and C = 0 they
        // all reduce to this one.
        if (v.dB != 0.0 || v.C != 0.0 || v.dC != 0.0) {
          throw Unsupported("unequal-speed Killing fields need B constant and C = 0");
        }
        return (2 * p - 1) * v.B + 2 * p * v.dA;
      }
      if (k != p - 1) {
        ProfileProblem even = pr;
        even.family = ProfileFamily::kKillingEven;
        return family_equation(even, v);
      }
      return (2 * p - 1) * v.B + 2 * p * v.dA -
             (l2 * l2 * s * (1 - s) * v.dC + l2 * (2 - (2 * p + 1) * s) * v.C);
  }
  return 0.0;
}

bool enlarged(const ProfileProblem& pr) {
  return pr.family == ProfileFamily::kEnlargedConformal || pr.family == ProfileFamily::kEnlargedKilling;
}

std::string metric_name(const ProfileProblem& pr, const std::string& how) {
  return to_string(pr.family) + "[" + pr.describe() + "]/" + how;
}

}  // namespace

std::string to_string(ProfileFamily f) {
  switch (f) {
    case ProfileFamily::kQuadratic: return "quadratic";
    case ProfileFamily::kKillingEven: return "killing_even";
    case ProfileFamily::kKillingOdd: return "killing_odd";
    case ProfileFamily::kEnlargedConformal: return "enlarged_conformal";
    case ProfileFamily::kEnlargedKilling: return "enlarged_killing";
  }
  return "unknown";
}

ProfileFamily parse_profile_family(const std::string& name) {
  for (ProfileFamily f : {ProfileFamily::kQuadratic, ProfileFamily::kKillingEven,
                          ProfileFamily::kKillingOdd, ProfileFamily::kEnlargedConformal,
                          ProfileFamily::kEnlargedKilling}) {
    if (to_string(f) == name) return f;
  }
  throw InvalidInput("unknown profile family '" + name + "'");
}

double ProfileProblem::t_peak() const {
  switch (family) {
    case ProfileFamily::kQuadratic: return mu * mu / 4.0;
    case ProfileFamily::kKillingEven:
    case ProfileFamily::kKillingOdd: return lambda * lambda;
    case ProfileFamily::kEnlargedConformal: return a_sq;
    case ProfileFamily::kEnlargedKilling: {
      double best = 0.0;
      for (double t : speeds()) best = std::max(best, t * t);
      return best;
    }
  }
  return 0.0;
}

std::vector<double> ProfileProblem::speeds() const {
  switch (family) {
    case ProfileFamily::kKillingEven: return repeated(lambda, p() - k);
    case ProfileFamily::kKillingOdd: return repeated(lambda, p() + 1 - k);
    case ProfileFamily::kEnlargedKilling:
      return thetas.empty() ? repeated(lambda, p() - k) : thetas;
    default: return {};
  }
}

bool ProfileProblem::unequal_speeds() const {
  const auto s = speeds();
  for (double t : s) {
    if (std::abs(std::abs(t) - std::abs(s.front())) > 1e-12) return true;
  }
  return false;
}

std::string ProfileProblem::describe() const {
  std::ostringstream os;
  os.precision(12);
  os << "n=" << n;
  switch (family) {
    case ProfileFamily::kQuadratic: os << ",mu=" << mu; break;
    case ProfileFamily::kKillingEven:
    case ProfileFamily::kKillingOdd: os << ",k=" << k << ",lambda=" << lambda; break;
    case ProfileFamily::kEnlargedConformal: os << ",|a|^2=" << a_sq << ",A0=" << A0; break;
    case ProfileFamily::kEnlargedKilling:
      os << ",speeds=";
      for (std::size_t i = 0; i < speeds().size(); ++i) os << (i ? ":" : "") << speeds()[i];
      os << ",A0=" << A0;
      break;
  }
  if (C.describe() != "0") os << ",C=" << C.describe();
  if (K != 1.0) os << ",K=" << K;
  return os.str();
}

void require_well_formed(const ProfileProblem& pr) {
  if (pr.n < 2) throw InvalidInput("sphere dimension must be >= 2");
  if (!(pr.K > 0.0)) throw InvalidInput("scale K must be positive");
  switch (pr.family) {
    case ProfileFamily::kQuadratic:
      if (!(pr.mu > 0.0)) throw InvalidInput("eigenvalue gap mu must be positive");
      break;
    case ProfileFamily::kKillingEven:
      if (pr.n % 2 != 0) throw InvalidInput("killing_even needs an even-dimensional sphere");
      if (pr.k < 0 || pr.k > pr.p() - 1) throw InvalidInput("killing_even needs 0 <= k <= p-1");
      if (pr.lambda == 0.0) throw InvalidInput("rotation speed must be nonzero");
      break;
    case ProfileFamily::kKillingOdd:
      if (pr.n % 2 != 1) throw InvalidInput("killing_odd needs an odd-dimensional sphere");
      if (pr.k < 0 || pr.k > pr.p()) throw InvalidInput("killing_odd needs 0 <= k <= p");
      if (pr.lambda == 0.0) throw InvalidInput("rotation speed must be nonzero");
      break;
    case ProfileFamily::kEnlargedConformal:
      if (!(pr.a_sq > 0.0)) throw InvalidInput("|a|^2 must be positive");
      if (!(pr.A0 > 0.0)) throw InvalidInput("A0 must be positive");
      break;
    case ProfileFamily::kEnlargedKilling: {
      if (pr.n % 2 != 0) throw InvalidInput("enlarged_killing is implemented on even spheres");
      if (!(pr.A0 > 0.0)) throw InvalidInput("A0 must be positive");
      const auto s = pr.speeds();
      if (s.empty() || static_cast<int>(s.size()) > pr.p()) {
        throw InvalidInput("enlarged_killing needs between 1 and p rotating planes");
      }
      for (double t : s) {
        if (t == 0.0) throw InvalidInput("rotation speeds must be nonzero");
      }
      if (pr.thetas.empty() && (pr.k < 0 || pr.k > pr.p() - 1)) {
        throw InvalidInput("enlarged_killing needs 0 <= k <= p-1");
      }
      break;
    }
  }
}

Manifold problem_manifold(const ProfileProblem& pr) { return Manifold::sphere(pr.n); }

FieldSpec associated_field(const ProfileProblem& pr) {
  require_well_formed(pr);
  switch (pr.family) {
    case ProfileFamily::kQuadratic: {
      const int top = pr.n % 2 == 1 ? (pr.n + 1) / 2 : pr.n / 2;
      return FieldSpec::quadratic({{pr.mu, top}, {0.0, pr.n + 1 - top}});
    }
    case ProfileFamily::kEnlargedConformal: {
      Vector a = Vector::Zero(pr.n + 1);
      a[pr.n] = std::sqrt(pr.a_sq);
      return FieldSpec::conformal(a);
    }
    default: return FieldSpec::killing(pr.speeds());
  }
}

OdeCoefficients ode_coefficients(const ProfileProblem& pr, double t) {
  const int n = pr.n, p = pr.p(), k = pr.k;
  const double l2 = pr.lambda * pr.lambda, s = t / l2;
  const double c = pr.C.value(t), dc = pr.C.derivative(t);
  switch (pr.family) {
    case ProfileFamily::kQuadratic: {
      const double mu2 = pr.mu * pr.mu;
      return {0.5 * (n - 3) * mu2 - (n - 5) * t, double(n + 3),
              t * (mu2 - 4 * t) * dc + (0.5 * (n + 1) * mu2 - 2.0 * (n + 3) * t) * c};
    }
    case ProfileFamily::kKillingEven:
      return {2 * l2 * (p - k - 1), double(2 * p - 1),
              l2 * (2.0 * (p - k) - (2 * p + 1) * s) * c + l2 * l2 * s * (1 - s) * dc};
    case ProfileFamily::kKillingOdd:
      return {l2 * (p - k), double(p),
              l2 * ((p + 1 - k) - (p + 1) * s) * c + 0.5 * l2 * l2 * s * (1 - s) * dc};
    case ProfileFamily::kEnlargedConformal: {
      const double lam2 = pr.a_sq - t;
      return {n + (n - 2) * lam2, 1.0, lam2 * t * dc + (n * lam2 - t) * c};
    }
    case ProfileFamily::kEnlargedKilling:
      if (pr.unequal_speeds()) {
        throw Unsupported("unequal-speed Killing fields have no single profile equation");
      }
      if (k != p - 1) {
        ProfileProblem even = pr;
        even.family = ProfileFamily::kKillingEven;
        return ode_coefficients(even, t);
      }
      return {2.0 * p, double(2 * p - 1),
              l2 * l2 * s * (1 - s) * dc + l2 * (2 - (2 * p + 1) * s) * c};
  }
  return {};
}

ObstructionOutcome check_problem(const ProfileProblem& pr,
                                 const std::vector<KKMetricSpec>& candidates) {
  require_well_formed(pr);
  const int p = pr.p();
  switch (pr.family) {
    case ProfileFamily::kQuadratic:
      if (pr.n % 2 == 0) return obstruction_check("quadratic_even", {{"mu", pr.mu}}, {}, candidates);
      if (pr.n == 3) return obstruction_check("quadratic_n3", {{"mu", pr.mu}}, {}, candidates);
      return Feasible{"two eigenvalues of multiplicity (n+1)/2 with n > 3"};
    case ProfileFamily::kKillingEven:
      if (pr.k == p - 1) {
        return obstruction_check("killing_even_maximal", {{"p", p}, {"lambda", pr.lambda}}, {},
                                 candidates);
      }
      return Feasible{"invariant axis is not maximal"};
    case ProfileFamily::kKillingOdd:
      if (pr.k == p) {
        return obstruction_check("killing_odd_maximal", {{"p", p}, {"lambda", pr.lambda}}, {},
                                 candidates);
      }
      return Feasible{"invariant axis is not maximal"};
    case ProfileFamily::kEnlargedConformal:
      return Feasible{"A = B + A0 absorbs the conformal obstruction"};
    case ProfileFamily::kEnlargedKilling:
      return Feasible{pr.unequal_speeds() ? "B constant with A linear in t"
                                          : "A = B + A0 with an exponential B"};
  }
  return Feasible{""};
}

ProfileOutcome closed_form_B(const ProfileProblem& pr) {
  const ObstructionOutcome check = check_problem(pr, {});
  if (const auto* o = std::get_if<Obstruction>(&check)) return *o;

  const int n = pr.n, p = pr.p(), k = pr.k;
  const double l2 = pr.lambda * pr.lambda;
  const double tp = pr.t_peak();
  ProfileSolution sol;
  sol.problem = pr;
  sol.problem.C = ScalarProfile::constant(0.0);
  sol.t_peak = tp;
  KKMetricSpec& g = sol.metric;
  g.t_max = tp + 1.0;
  g.C = ScalarProfile::constant(0.0);
  const double K = pr.K;

  switch (pr.family) {
    case ProfileFamily::kQuadratic: {
      const double mu2 = pr.mu * pr.mu;
      if (n == 5) {
        g.B = ScalarProfile::exponential(K, -8.0 / mu2);
        sol.formula = "B = K exp(-8t/mu^2)";
      } else {
        g.B = ScalarProfile::extended(
            ScalarProfile::power(K, 0.5 * (n - 3) * mu2, -(n - 5.0), (n + 3.0) / (n - 5.0)), tp);
        sol.formula = "B = K [(n-3)mu^2/2 - (n-5)t]^((n+3)/(n-5))";
      }
      break;
    }
    case ProfileFamily::kKillingEven:
      g.B = ScalarProfile::exponential(K, -(2.0 * p - 1.0) / (2.0 * l2 * (p - 1 - k)));
      sol.formula = "B = K exp(-(2p-1)t/(2 lambda^2 (p-1-k)))";
      break;
    case ProfileFamily::kKillingOdd:
      if (k == 0 && pr.power_variant) {
        g.B = ScalarProfile::power(K, 1.0, 1.0, -(1.0 + 1.0 / l2));
        sol.formula = "B = K (1+t)^(-(1+1/lambda^2))";
      } else if (k == 0) {
        g.B = ScalarProfile::exponential(K, -1.0 / l2);
        sol.formula = "B = K exp(-t/lambda^2)";
      } else {
        g.B = ScalarProfile::exponential(K, -double(p) / (l2 * (p - k)));
        sol.formula = "B = K exp(-p t/(lambda^2 (p-k)))";
      }
      break;
    case ProfileFamily::kEnlargedConformal:
      if (n == 2) {
        g.B = ScalarProfile::exponential(K, -0.5);
        sol.formula = "A = B + A0, B = K exp(-t/2)";
      } else {
        g.B = ScalarProfile::extended(
            ScalarProfile::power(K, n + (n - 2.0) * pr.a_sq, -(n - 2.0), 1.0 / (n - 2.0)), tp);
        sol.formula = "A = B + A0, B = K [n + (n-2)|a|^2 - (n-2)t]^(1/(n-2))";
      }
      g.A = g.B + ScalarProfile::constant(pr.A0);
      break;
    case ProfileFamily::kEnlargedKilling:
      if (pr.unequal_speeds()) {
        const double slope = -(2.0 * p - 1.0) * K / (2.0 * p);
        if (!(pr.A0 + slope * tp > 0.0)) {
          throw InvalidInput("A0 too small: A(t) = A0 - (2p-1) B0 t/(2p) must stay positive up to " +
                             num(tp));
        }
        g.B = ScalarProfile::constant(K);
        g.A = ScalarProfile::extended(ScalarProfile::linear(pr.A0, slope), tp);
        sol.formula = "B = B0, A = A0 - (2p-1) B0 t/(2p)";
      } else if (k == p - 1) {
        g.B = ScalarProfile::exponential(K, 1.0 / (2.0 * p) - 1.0);
        g.A = g.B + ScalarProfile::constant(pr.A0);
        sol.formula = "A = B + A0, B = K exp((1/(2p) - 1)t)";
      } else {
        g.B = ScalarProfile::exponential(K, -(2.0 * p - 1.0) / (2.0 * l2 * (p - 1 - k)));
        sol.formula = "B = K exp(-(2p-1)t/(2 lambda^2 (p-1-k)))";
      }
      break;
  }
  g.name = metric_name(pr, "closed-form");
  return sol;
}

ProfileSolution construct_B_from_C(const ProfileProblem& pr) {
  const ProfileOutcome closed = closed_form_B(pr);
  if (const auto* o = std::get_if<Obstruction>(&closed)) {
    throw InvalidInput("inadmissible problem " + pr.describe() + ": " + o->inequality);
  }
  if (pr.family == ProfileFamily::kEnlargedKilling && pr.unequal_speeds()) {
    throw InvalidInput("unequal-speed Killing fields are solved by a linear A, not by an ODE in B");
  }
  const ProfileSolution& base = std::get<ProfileSolution>(closed);
  const double tp = pr.t_peak();
  const int steps = std::max(1, static_cast<int>(std::ceil(tp / kSolverStep - 1e-9)));
  const double h = tp / steps;

  auto slope = [&](double t, double b) {
    const OdeCoefficients c = ode_coefficients(pr, t);
    return (c.rhs - c.a0 * b) / c.a1;
  };
  std::vector<double> values(steps + 1), derivs(steps + 1);
  double b = base.metric.B.value(0.0);
  for (int i = 0; i <= steps; ++i) {
    const double t = i * h;
    if (!(b > 0.0)) {
      throw DomainError("constructed B is not positive at t=" + num(t) + " for " + pr.describe());
    }
    values[i] = b;
    derivs[i] = slope(t, b);
    if (i == steps) break;
    const double k1 = derivs[i];
    const double k2 = slope(t + 0.5 * h, b + 0.5 * h * k1);
    const double k3 = slope(t + 0.5 * h, b + 0.5 * h * k2);
    const double k4 = slope(t + h, b + h * k3);
    b += (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4);
  }

  ProfileSolution sol;
  sol.problem = pr;
  sol.t_peak = tp;
  sol.formula = "RK4 solution of the family equation from B(0) = " + num(values.front());
  KKMetricSpec& g = sol.metric;
  g.name = metric_name(pr, "ode");
  g.t_max = tp + 1.0;
  g.B = ScalarProfile::extended(ScalarProfile::tabulated(0.0, h, values, derivs), tp);
  g.C = pr.C;
  if (enlarged(pr) && !(pr.family == ProfileFamily::kEnlargedKilling && pr.k != pr.p() - 1)) {
    g.A = g.B + ScalarProfile::constant(pr.A0);
  }
  const ValidationReport report = validate(g);
  if (!report.ok) {
    throw DomainError("constructed metric for " + pr.describe() + " is not valid: " + report.message);
  }
  return sol;
}

double ode_residual(const ProfileProblem& pr, const KKMetricSpec& metric) {
  const double tp = pr.t_peak();
  if (pr.family == ProfileFamily::kKillingOdd && pr.k == 0) {
    return std::abs(family_equation(pr, evaluate_profiles(metric, tp)));
  }
  double worst = 0.0;
  const int count = static_cast<int>(std::floor(tp / kResidualGrid + 1e-9));
  for (int j = 0; j <= count; ++j) {
    const double t = std::min(j * kResidualGrid + 0.5 * kSolverStep, tp);
    worst = std::max(worst, std::abs(family_equation(pr, evaluate_profiles(metric, t))));
  }
  return worst;
}

ObstructionOutcome obstruction_check(const std::string& id,
                                     const std::map<std::string, double>& params,
                                     const std::vector<double>& thetas,
                                     const std::vector<KKMetricSpec>& candidates) {
  if (id == "quadratic_n3") {
    const double mu = param(params, "mu");
    const double t = mu * mu / 4.0;
    const auto specs = valid_candidates(candidates);
    if (specs.empty()) return Feasible{"no candidate metric is positive definite"};
    Obstruction best;
    best.margin = INFINITY;
    for (const auto& s : specs) {
      const ProfileValues v = evaluate_profiles(s, t);
      const double lhs = (mu * mu - 4.0 * t) * v.C;
      const double margin = 2.0 * v.B - lhs;
      if (margin < best.margin) {
        best = {id, "(mu^2 - 4t) C(t) >= 2 B(t) at t = mu^2/4", t, lhs - 2.0 * v.B, margin, s.name};
      }
    }
    return best;
  }
  if (id == "quadratic_even") {
    const double mu = param(params, "mu");
    return radial_obstruction(id, "B(t) + t C(t) = 0 at t = mu^2/4", mu * mu / 4.0, 1.0, candidates);
  }
  if (id == "conformal") {
    const double a_sq = param(params, "a_sq");
    return radial_obstruction(id, "B(|a|^2) + |a|^2 C(|a|^2) = 0", a_sq, 1.0, candidates);
  }
  if (id == "killing_even_maximal") {
    const double p = param(params, "p"), l = param(params, "lambda");
    return radial_obstruction(id, "(2p-1) (B + tC)(t) = 0 at t = lambda^2", l * l, 2.0 * p - 1.0,
                              candidates);
  }
  if (id == "killing_odd_maximal") {
    const double p = param(params, "p"), l = param(params, "lambda");
    return radial_obstruction(id, "p (B + tC)(t) = 0 at t = lambda^2", l * l, p, candidates);
  }
  if (id == "killing_unequal_even" || id == "killing_unequal_odd") {
    const int n = static_cast<int>(param(params, "n"));
    const bool even = id == "killing_unequal_even";
    if ((n % 2 == 0) != even) throw InvalidInput(id + " does not match the parity of n");
    if (thetas.empty()) throw InvalidInput(id + " needs rotation speeds");
    double sum = 0.0, top = 0.0;
    bool unequal = false;
    for (double t : thetas) {
      sum += t * t;
      top = std::max(top, t * t);
      unequal |= std::abs(t * t - thetas.front() * thetas.front()) > 1e-12;
    }
    if (!unequal) return Feasible{"all rotation speeds are equal"};
    const AxisInfo axis = axis_info(thetas, n + 1);
    if (even) {
      const double value = -(2.0 * axis.k + 1.0) * sum;
      return Obstruction{id, "-(2k+1) sum theta_i^2 > 0", 0.0, value, -value, ""};
    }
    if (axis.k > 0) {
      const double value = -axis.k * sum;
      return Obstruction{id, "-k sum theta_i^2 > 0", 0.0, value, -value, ""};
    }
    // With k = 0 the summed inequality degenerates; the per-axis inequality
    // at the fastest plane already fails.
    const double value = sum - (axis.p + 1.0) * top;
    return Obstruction{id, "sum theta_i^2 - (p+1) theta_j^2 > 0 for every j", top, value, -value,
                       ""};
  }
  throw InvalidInput("unknown obstruction case '" + id + "'");
}

ObstructionOutcome quadratic_structure_check(const Manifold& m, const FieldSpec& field,
                                             const std::vector<Vector>& points) {
  if (!field.get_if<FieldSpec::QuadraticGradient>()) {
    throw InvalidInput("quadratic_structure_check needs a quadratic field");
  }
  double worst = 0.0;
  double worst_t = 0.0;
  for (const Vector& p : points) {
    const FieldCalculus c = field_calculus(m, field, p);
    if (c.norm_sq < 1e-12) continue;
    const Vector v = c.derivative_along(m, c.grad_half_norm);
    const Vector orth = v - (m.inner(p, v, c.value) / c.norm_sq) * c.value;
    const double r = std::sqrt(m.norm_sq(p, orth));
    if (r > worst) {
      worst = r;
      worst_t = c.norm_sq;
    }
  }
  if (worst > 1e-6) {
    return Obstruction{"quadratic_eigen_structure", "nabla_{X(sigma)} sigma parallel to sigma",
                       worst_t, worst, worst, ""};
  }
  std::ostringstream os;
  os << field.distinct_eigenvalues() << " distinct eigenvalues; nabla_{X(sigma)} sigma stays parallel";
  return Feasible{os.str()};
}

std::vector<KKMetricSpec> candidate_grid(double t_max, double beta_min, double beta_max,
                                         int beta_steps, double c_min, double c_max, int c_steps) {
  std::vector<KKMetricSpec> out;
  for (int i = 0; i < beta_steps; ++i) {
    const double beta =
        beta_steps == 1 ? beta_min : beta_min + (beta_max - beta_min) * i / (beta_steps - 1.0);
    for (int j = 0; j < c_steps; ++j) {
      const double c = c_steps == 1 ? c_min : c_min + (c_max - c_min) * j / (c_steps - 1.0);
      KKMetricSpec s;
      s.name = "B=exp(" + num(beta) + "t),C=" + num(c) + "exp(" + num(beta) + "t)";
      s.B = ScalarProfile::exponential(1.0, beta);
      s.C = c == 0.0 ? ScalarProfile::constant(0.0) : ScalarProfile::exponential(c, beta);
      s.t_max = t_max;
      if (validate(s).ok) out.push_back(std::move(s));
    }
  }
  return out;
}

SweepResult sweep_vertical_residual(const Manifold& m, const FieldSpec& field,
                                    const std::vector<KKMetricSpec>& candidates,
                                    const std::vector<Vector>& points) {
  std::vector<FieldCalculus> calcs;
  calcs.reserve(points.size());
  for (const Vector& p : points) calcs.push_back(field_calculus(m, field, p));
  SweepResult r;
  r.min_residual = INFINITY;
  for (const auto& spec : candidates) {
    double worst = 0.0;
    try {
      for (const auto& c : calcs) worst = std::max(worst, tension(m, spec, c).vertical_norm);
    } catch (const MetricDegeneracy&) {
      continue;
    }
    ++r.candidates;
    if (worst < r.min_residual) {
      r.min_residual = worst;
      r.best_metric = spec.name;
    }
  }
  return r;
}

}  // namespace kkharm
