#include "kkharm/suite/runner.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "kkharm/energy/energy.hpp"
#include "kkharm/energy/flow.hpp"
#include "kkharm/fields/sampling.hpp"
#include "kkharm/metric/koszul.hpp"
#include "kkharm/tension/tension.hpp"
#include "kkharm/util/errors.hpp"
#include "kkharm/util/parallel.hpp"
#include "kkharm/util/random.hpp"

#ifndef KKHARM_VERSION
#define KKHARM_VERSION "unknown"
#endif

namespace kkharm::suite {
namespace {

constexpr const char* kHolds = "holds";
constexpr const char* kViolated = "violated";
constexpr int kProfileTableRows = 201;

struct Context {
  const CaseConfig& c;
  CaseResult& out;
  Rng rng;
  std::uint64_t seed;
};

const char* holds(bool ok) { return ok ? kHolds : kViolated; }

std::string number_text(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

// Low-wavenumber Fourier field on a torus; `offset` is added to the first
// component so normalized versions stay away from zeros.
FieldSpec random_fourier(Rng& rng, double amplitude, double offset) {
  std::vector<FourierMode> modes;
  for (int comp = 0; comp < 2; ++comp) {
    for (int m = 0; m < 3; ++m) {
      FourierMode f;
      f.component = comp;
      f.coef = amplitude * rng.normal() / 3.0;
      f.kx = static_cast<int>(std::floor(rng.uniform(-2.0, 3.0)));
      f.ky = static_cast<int>(std::floor(rng.uniform(-2.0, 3.0)));
      f.phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
      modes.push_back(f);
    }
  }
  if (offset != 0.0) modes.push_back({0, offset, 0, 0, 0.5 * std::numbers::pi});
  return FieldSpec::fourier(std::move(modes));
}

void put_report(CaseResult& out, const ResidualReport& r) {
  out.metrics["max_norm_G"] = r.max_norm_G;
  out.metrics["mean_norm_G"] = r.mean_norm_G;
  out.metrics["max_horizontal"] = r.max_horizontal;
  out.metrics["mean_horizontal"] = r.mean_horizontal;
  out.metrics["max_vertical"] = r.max_vertical;
  out.metrics["mean_vertical"] = r.mean_vertical;
  out.metrics["max_unit"] = r.max_unit;
  out.metrics["samples"] = r.samples;
  out.details["field"] = r.field_id;
  out.details["metric"] = r.metric_id;
  out.verdict = r.verdict;
}

void put_norm_range(CaseResult& out, const Manifold& m, const FieldSpec& f, const std::vector<Vector>& points) {
  double lo = INFINITY, hi = 0.0;
  for (const Vector& p : points) {
    const Vector v = evaluate(m, f, p);
    const double t = m.inner(p, v, v);
    lo = std::min(lo, t);
    hi = std::max(hi, t);
  }
  out.metrics["norm_sq_min"] = lo;
  out.metrics["norm_sq_max"] = hi;
  out.metrics["norm_sq_spread"] = hi - lo;
}

void put_obstruction(CaseResult& out, const ObstructionOutcome& o) {
  if (const auto* ob = std::get_if<Obstruction>(&o)) {
    out.verdict = "obstructed";
    out.metrics["margin"] = ob->margin;
    out.metrics["witness_t"] = ob->witness_t;
    out.metrics["witness_value"] = ob->witness_value;
    out.details["certificate"] = ob->case_id;
    out.details["inequality"] = ob->inequality;
    if (!ob->metric.empty()) out.details["witness_metric"] = ob->metric;
  } else {
    out.verdict = "feasible";
    out.details["reason"] = std::get<Feasible>(o).reason;
  }
}

Table profile_table(const KKMetricSpec& spec) {
  Table t;
  t.name = "profile";
  t.columns = {"t", "B", "dB"};
  for (int i = 0; i < kProfileTableRows; ++i) {
    const double s = spec.t_max * i / (kProfileTableRows - 1);
    t.rows.push_back({s, spec.B.value(s), spec.B.derivative(s)});
  }
  return t;
}

void run_tension(Context& x) {
  const Manifold& m = *x.c.manifold;
  const FieldSpec& f = x.c.fields.front();
  const auto points = sample_points(m, &f, x.c.samples, x.rng);
  put_report(x.out, residual_report(m, x.c.metrics.front(), f, points, x.c.tolerance, x.c.path));
  put_norm_range(x.out, m, f, points);
  x.out.details["manifold"] = m.describe();
}

void run_koszul(Context& x) {
  double metric_res = 0.0, torsion_res = 0.0;
  for (std::size_t i = 0; i < x.c.metrics.size(); ++i) {
    const auto& spec = x.c.metrics[i];
    const KoszulReport r =
        koszul_residuals(spec, x.c.manifold->dimension(), x.c.samples, derive_seed(x.seed, spec.name));
    x.out.metrics["metric_residual." + spec.name] = r.metric_residual;
    x.out.metrics["torsion_residual." + spec.name] = r.torsion_residual;
    metric_res = std::max(metric_res, r.metric_residual);
    torsion_res = std::max(torsion_res, r.torsion_residual);
  }
  x.out.metrics["metric_residual"] = metric_res;
  x.out.metrics["torsion_residual"] = torsion_res;
  x.out.verdict = holds(metric_res < x.c.tolerance && torsion_res < x.c.tolerance);
}

void run_profile(Context& x) {
  const ProfileProblem& pr = *x.c.problem;
  ProfileSolution sol;
  if (x.c.profile_mode == "ode") {
    sol = construct_B_from_C(pr);
  } else {
    const ProfileOutcome o = closed_form_B(pr);
    if (const auto* ob = std::get_if<Obstruction>(&o)) {
      put_obstruction(x.out, *ob);
      return;
    }
    sol = std::get<ProfileSolution>(o);
  }
  const Manifold m = problem_manifold(pr);
  const FieldSpec f = associated_field(pr);
  const auto points = sample_points(m, &f, x.c.samples, x.rng);
  put_report(x.out, residual_report(m, sol.metric, f, points, x.c.tolerance, x.c.path));
  put_norm_range(x.out, m, f, points);
  x.out.metrics["ode_residual"] = ode_residual(pr, sol.metric);
  x.out.metrics["t_peak"] = sol.t_peak;
  x.out.metrics["B_at_0"] = sol.metric.B.value(0.0);
  x.out.details["formula"] = sol.formula;
  x.out.details["problem"] = to_string(pr.family) + "[" + pr.describe() + "]";
  x.out.tables.push_back(profile_table(sol.metric));
}

void run_obstruction(Context& x) {
  if (x.c.obstruction == "quadratic_eigen_structure") {
    const auto points = sample_points(*x.c.manifold, &x.c.fields.front(), x.c.samples, x.rng);
    put_obstruction(x.out, quadratic_structure_check(*x.c.manifold, x.c.fields.front(), points));
  } else if (x.c.problem) {
    put_obstruction(x.out, check_problem(*x.c.problem, x.c.metrics));
  } else {
    put_obstruction(x.out, obstruction_check(x.c.obstruction, x.c.params, x.c.thetas, x.c.metrics));
  }
}

void run_conformal_defect(Context& x) {
  const Manifold& m = *x.c.manifold;
  const FieldSpec& f = x.c.fields.front();
  const Vector a = f.get_if<FieldSpec::Conformal>()->a;
  const double a_sq = a.squaredNorm();
  const Vector dir = a / a.norm();
  // Points of the great sphere lambda = <a, x> = 0.
  std::vector<Vector> points;
  for (int i = 0; i < x.c.samples; ++i) {
    Vector p = x.rng.unit_vector(m.ambient_dim());
    p -= p.dot(dir) * dir;
    points.push_back(p / p.norm());
  }
  double max_err = 0.0, min_defect = INFINITY;
  int specs = 0;
  for (const auto& spec : x.c.metrics) {
    ++specs;
    const double expected = evaluate_profiles(spec, a_sq).radial();
    for (const Vector& p : points) {
      const FieldCalculus calc = field_calculus(m, f, p);
      const TensionResult tau = tension(m, spec, calc);
      const ProfileValues v = checked_profiles(spec, calc.norm_sq);
      const double defect = -v.radial() * m.inner(p, tau.vertical, calc.value) / calc.norm_sq;
      max_err = std::max(max_err, std::abs(defect - expected));
      min_defect = std::min(min_defect, defect);
    }
  }
  x.out.metrics["max_defect_error"] = max_err;
  x.out.metrics["min_defect"] = min_defect;
  x.out.metrics["specs"] = specs;
  x.out.verdict = min_defect > 0.0 ? "obstructed" : "feasible";
}

void run_sweep(Context& x) {
  const Manifold& m = *x.c.manifold;
  const FieldSpec& f = x.c.fields.front();
  const auto points = sample_points(m, &f, x.c.samples, x.rng);
  const SweepResult r = sweep_vertical_residual(m, f, x.c.metrics, points);
  x.out.metrics["min_residual"] = r.min_residual;
  x.out.metrics["candidates"] = r.candidates;
  x.out.details["best_metric"] = r.best_metric;
  x.out.verdict = r.min_residual > x.c.tolerance ? "not harmonic" : "harmonic section";
}

void run_identity(Context& x) {
  const Manifold& m = *x.c.manifold;
  const FieldSpec& f = x.c.fields.front();
  const auto points = sample_points(m, &f, x.c.samples, x.rng);
  std::vector<std::map<std::string, IdentityResidual>> all(points.size());
  parallel_for(points.size(), [&](std::size_t i) { all[i] = identity_checks(m, x.c.metrics.front(), f, points[i]); });
  std::map<std::string, double> worst;
  std::map<std::string, int> used;
  for (const auto& checks : all) {
    for (const auto& [name, r] : checks) {
      if (!x.c.identities.empty() &&
          std::find(x.c.identities.begin(), x.c.identities.end(), name) == x.c.identities.end()) {
        continue;
      }
      if (!r.applicable) {
        x.out.details["not_applicable." + name] = r.reason;
        continue;
      }
      worst[name] = std::max(worst[name], r.value);
      ++used[name];
    }
  }
  for (const std::string& name : x.c.identities) {
    if (!used.count(name)) throw InvalidInput("identity '" + name + "' was never applicable");
  }
  bool ok = !worst.empty();
  for (const auto& [name, v] : worst) {
    x.out.metrics["max_" + name] = v;
    x.out.metrics["points_" + name] = used[name];
    ok = ok && v < x.c.tolerance;
  }
  x.out.verdict = holds(ok);
}

void run_yano(Context& x) {
  const Manifold& m = *x.c.manifold;
  const Quadrature q = default_quadrature(m, x.c.resolution, derive_seed(x.seed, "quadrature"));
  const double value = yano_integral(m, x.c.fields.front(), q, x.c.path);
  x.out.metrics["value"] = value;
  x.out.metrics["volume"] = m.volume();
  x.out.metrics["relative"] = std::abs(value) / m.volume();
  x.out.details["quadrature"] = q.description;
  x.out.verdict = holds(std::abs(value) / m.volume() < x.c.tolerance);
}

void run_duality(Context& x) {
  const Manifold& m = *x.c.manifold;
  const KKMetricSpec& spec = x.c.metrics.front();
  if (x.c.duality_mode != "torus") {
    const Quadrature q = default_quadrature(m, x.c.resolution, derive_seed(x.seed, "quadrature"));
    const DualityResult r = x.c.duality_mode == "map"
                                ? map_variation_duality(m, spec, x.c.fields.front(), *x.c.variation, q)
                                : section_variation_duality(m, spec, x.c.fields.front(), *x.c.variation, q);
    x.out.metrics["derivative"] = r.derivative;
    x.out.metrics["predicted"] = r.predicted;
    x.out.metrics["absolute"] = r.absolute;
    x.out.metrics["relative"] = r.relative;
    x.out.details["quadrature"] = q.description;
    x.out.verdict = holds(r.relative < x.c.tolerance);
    return;
  }
  // Torus: random (field, variation) pairs, each at every resolution.
  const auto& res = x.c.resolutions;
  std::vector<std::vector<double>> rel(x.c.pairs, std::vector<double>(res.size()));
  for (int k = 0; k < x.c.pairs; ++k) {
    const FieldSpec f = k == 0 ? x.c.fields.front() : random_fourier(x.rng, 1.0, 0.8);
    const FieldSpec v = random_fourier(x.rng, 1.0, 0.0);
    for (std::size_t r = 0; r < res.size(); ++r) {
      rel[k][r] = torus_duality(m, spec, f, DiscreteField::sample(m, v, res[r])).relative;
    }
  }
  bool ok = true;
  for (std::size_t r = 0; r < res.size(); ++r) {
    double worst = 0.0;
    for (int k = 0; k < x.c.pairs; ++k) worst = std::max(worst, rel[k][r]);
    x.out.metrics["max_relative_" + std::to_string(res[r])] = worst;
    if (r == 0) ok = worst < x.c.tolerance;
  }
  if (res.size() >= 2) {
    double ratio = INFINITY;
    for (int k = 0; k < x.c.pairs; ++k) ratio = std::min(ratio, rel[k][0] / std::max(rel[k][1], 1e-300));
    x.out.metrics["min_refinement_ratio"] = ratio;
    ok = ok && ratio >= 2.0;
  }
  x.out.metrics["pairs"] = x.c.pairs;
  x.out.verdict = holds(ok);
}

void run_flow(Context& x) {
  const Manifold& m = *x.c.manifold;
  const KKMetricSpec& spec = x.c.metrics.front();
  std::vector<FlowResult> results;
  std::vector<DiscreteField> inits;
  for (int r = 0; r < x.c.runs; ++r) inits.push_back(random_unit_field(m, x.c.resolution, x.rng));
  results.resize(inits.size());
  parallel_for(inits.size(), [&](std::size_t r) { results[r] = unit_flow_torus(m, spec, inits[r], x.c.schedule); });

  const double parallel_energy = 0.5 * m.dimension() * checked_profiles(spec, 1.0).A * m.volume();
  double max_res = 0.0, max_gap = 0.0, e_lo = INFINITY, e_hi = -INFINITY;
  int converged = 0, max_it = 0;
  bool monotone = true;
  for (std::size_t r = 0; r < results.size(); ++r) {
    const FlowResult& fr = results[r];
    max_res = std::max(max_res, fr.residual);
    max_it = std::max(max_it, fr.iterations);
    e_lo = std::min(e_lo, fr.energy);
    e_hi = std::max(e_hi, fr.energy);
    max_gap = std::max(max_gap, std::abs(fr.energy - parallel_energy) / parallel_energy);
    converged += fr.converged ? 1 : 0;
    monotone = monotone && fr.monotone;
    x.out.details["run" + std::to_string(r)] = fr.message;
    Table t;
    t.name = "flow_run" + std::to_string(r);
    t.columns = {"iteration", "energy", "residual"};
    for (const FlowRecord& h : fr.history) t.rows.push_back({double(h.iteration), h.energy, h.residual});
    x.out.tables.push_back(std::move(t));
  }
  x.out.metrics["max_residual"] = max_res;
  x.out.metrics["max_iterations"] = max_it;
  x.out.metrics["converged_runs"] = converged;
  x.out.metrics["runs"] = x.c.runs;
  x.out.metrics["energy_min"] = e_lo;
  x.out.metrics["energy_max"] = e_hi;
  x.out.metrics["monotone"] = monotone ? 1.0 : 0.0;
  if (m.is_flat()) {
    x.out.metrics["parallel_energy"] = parallel_energy;
    x.out.metrics["max_energy_gap"] = max_gap;
  }
  x.out.verdict = converged == x.c.runs && monotone ? "converged" : "not converged";
}

void run_conformal_energy(Context& x) {
  const Manifold& m = *x.c.manifold;
  std::vector<FieldSpec> fields = x.c.fields;
  for (int i = 0; i < x.c.random_sections; ++i) {
    fields.push_back(FieldSpec::normalized(random_fourier(x.rng, 0.6, 2.0)));
  }
  const ConformalChange change{x.c.u, x.c.exponent};
  double lo = INFINITY, hi = -INFINITY, predicted = 0.0, sum = 0.0;
  for (const FieldSpec& f : fields) {
    const EnergyDelta d = conformal_energy_delta(m, change, f, x.c.metrics.front(), x.c.resolution);
    lo = std::min(lo, d.measured);
    hi = std::max(hi, d.measured);
    sum += d.measured;
    predicted = d.predicted;
  }
  const double scale = std::max(std::abs(predicted), 1e-12);
  const double mean = sum / fields.size();
  const double err = std::max(std::abs(lo - predicted), std::abs(hi - predicted)) / scale;
  const double spread = (hi - lo) / std::max(std::abs(mean), 1e-12);
  x.out.metrics["predicted"] = predicted;
  x.out.metrics["measured_min"] = lo;
  x.out.metrics["measured_max"] = hi;
  x.out.metrics["max_relative_error"] = err;
  x.out.metrics["spread"] = spread;
  x.out.metrics["sections"] = static_cast<double>(fields.size());
  x.out.details["u"] = x.c.u.describe();
  x.out.verdict = holds(err < x.c.tolerance && spread < x.c.tolerance);
}

void run_constant_norm(Context& x) {
  const double v = constant_norm_condition(*x.c.profile, x.c.k);
  x.out.metrics["value"] = v;
  x.out.metrics["abs_value"] = std::abs(v);
  x.out.details["profile"] = x.c.profile->describe();
  x.out.verdict = holds(std::abs(v) < x.c.tolerance);
}

}  // namespace

Environment current_environment() {
  Environment e;
  e.version = KKHARM_VERSION;
#if defined(__clang__)
  e.compiler = std::string("clang ") + __clang_version__;
#elif defined(__GNUC__)
  e.compiler = std::string("gcc ") + __VERSION__;
#else
  e.compiler = "unknown";
#endif
  e.eigen = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
            std::to_string(EIGEN_MINOR_VERSION);
  e.rng = "mt19937_64; uniform = top 53 bits; normal = Box-Muller; case seeds = splitmix64(fnv1a)";
  return e;
}

bool Report::all_match() const {
  return std::all_of(cases.begin(), cases.end(), [](const CaseResult& c) { return c.match; });
}

CaseResult run_case(const CaseConfig& c, std::uint64_t suite_seed) {
  CaseResult out;
  out.id = c.id;
  out.check = to_string(c.check);
  out.expect = c.expect;
  const std::uint64_t seed = derive_seed(suite_seed, c.id);
  Context x{c, out, Rng(seed), seed};
  try {
    switch (c.check) {
      case Check::kTension: run_tension(x); break;
      case Check::kKoszul: run_koszul(x); break;
      case Check::kProfile: run_profile(x); break;
      case Check::kObstruction: run_obstruction(x); break;
      case Check::kConformalDefect: run_conformal_defect(x); break;
      case Check::kSweep: run_sweep(x); break;
      case Check::kIdentity: run_identity(x); break;
      case Check::kYano: run_yano(x); break;
      case Check::kDuality: run_duality(x); break;
      case Check::kFlow: run_flow(x); break;
      case Check::kConformalEnergy: run_conformal_energy(x); break;
      case Check::kConstantNorm: run_constant_norm(x); break;
    }
  } catch (const std::exception& e) {
    out.verdict = "error";
    out.error = e.what();
  }
  for (const Assertion& a : c.asserts) {
    const auto it = out.metrics.find(a.metric);
    if (it == out.metrics.end()) {
      out.failed_assertions.push_back(a.describe() + " (metric missing)");
    } else if (!a.holds(it->second)) {
      out.failed_assertions.push_back(a.describe() + " (got " + number_text(it->second) + ")");
    }
  }
  out.match = out.error.empty() && out.verdict == out.expect && out.failed_assertions.empty();
  return out;
}

Report run_suite(const SuiteConfig& config, const CaseFilter& filter) {
  std::vector<const CaseConfig*> selected;
  for (const auto& c : config.cases) {
    if (!filter || filter(c)) selected.push_back(&c);
  }
  Report r;
  r.suite = config.name;
  r.seed = config.seed;
  r.environment = current_environment();
  r.cases.resize(selected.size());
  parallel_for(selected.size(), [&](std::size_t i) { r.cases[i] = run_case(*selected[i], config.seed); });
  std::sort(r.cases.begin(), r.cases.end(), [](const CaseResult& a, const CaseResult& b) { return a.id < b.id; });
  return r;
}

}  // namespace kkharm::suite
