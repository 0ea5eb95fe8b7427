#include "kkharm/suite/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "json.hpp"
#include "kkharm/util/errors.hpp"

namespace kkharm::suite {
namespace {

using json = nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw InvalidInput(path + ": " + message);
}

// Object view that records which keys were read so leftovers can be
// reported as unknown.
class Obj {
 public:
  Obj(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j.is_object()) fail(path_, "expected an object");
  }

  const std::string& path() const { return path_; }
  std::string sub(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  bool has(const std::string& key) const { return j_.contains(key); }

  const json& at(const std::string& key) {
    used_.insert(key);
    if (!j_.contains(key)) fail(sub(key), "required key is missing");
    return j_.at(key);
  }

  double number(const std::string& key) {
    const json& v = at(key);
    if (!v.is_number()) fail(sub(key), "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(sub(key), "expected a finite number");
    return x;
  }
  double number(const std::string& key, double fallback) { return has(key) ? number(key) : fallback; }

  int integer(const std::string& key) {
    const json& v = at(key);
    if (!v.is_number_integer()) fail(sub(key), "expected an integer");
    return v.get<int>();
  }
  int integer(const std::string& key, int fallback) { return has(key) ? integer(key) : fallback; }

  std::string string(const std::string& key) {
    const json& v = at(key);
    if (!v.is_string()) fail(sub(key), "expected a string");
    return v.get<std::string>();
  }
  std::string string(const std::string& key, const std::string& fallback) {
    return has(key) ? string(key) : fallback;
  }

  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const json& v = at(key);
    if (!v.is_boolean()) fail(sub(key), "expected true or false");
    return v.get<bool>();
  }

  std::vector<double> numbers(const std::string& key) {
    const json& v = at(key);
    if (!v.is_array()) fail(sub(key), "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) fail(sub(key) + "[" + std::to_string(i) + "]", "expected a number");
      out.push_back(v[i].get<double>());
    }
    return out;
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!used_.count(it.key())) fail(sub(it.key()), "unknown key");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

std::string item(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

const json& array_at(Obj& o, const std::string& key) {
  const json& v = o.at(key);
  if (!v.is_array()) fail(o.sub(key), "expected an array");
  return v;
}

Vector to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

// Re-raises library validation errors with the JSON path in front.
template <class F>
auto guarded(const std::string& path, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const InvalidInput& e) {
    const std::string what = e.what();
    if (what.rfind(path, 0) == 0) throw;
    fail(path, what);
  } catch (const Error& e) {
    fail(path, e.what());
  }
}

ScalarProfile parse_profile(const json& j, const std::string& path) {
  if (j.is_number()) return ScalarProfile::constant(j.get<double>());
  Obj o(j, path);
  const std::string type = o.string("type");
  ScalarProfile p;
  if (type == "constant") {
    p = ScalarProfile::constant(o.number("value"));
  } else if (type == "exponential") {
    p = ScalarProfile::exponential(o.number("k", 1.0), o.number("rate"));
  } else if (type == "power") {
    const double k = o.number("k", 1.0), base = o.number("base"), slope = o.number("slope");
    const double ex = o.number("exponent");
    p = guarded(path, [&] { return ScalarProfile::power(k, base, slope, ex); });
  } else if (type == "linear") {
    p = ScalarProfile::linear(o.number("c0"), o.number("c1"));
  } else if (type == "sum") {
    const json& terms = array_at(o, "terms");
    if (terms.empty()) fail(o.sub("terms"), "expected at least one term");
    p = parse_profile(terms[0], item(o.sub("terms"), 0));
    for (std::size_t i = 1; i < terms.size(); ++i) p = p + parse_profile(terms[i], item(o.sub("terms"), i));
  } else {
    fail(o.sub("type"), "unknown profile type '" + type + "'");
  }
  o.finish();
  return p;
}

Potential parse_potential(const json& j, const std::string& path) {
  Obj o(j, path);
  Potential u;
  if (o.has("product_sine")) u = u + Potential::product_sine(o.number("product_sine"));
  if (o.has("sine_x")) u = u + Potential::sine_x(o.number("sine_x"));
  if (o.has("terms")) {
    const json& terms = array_at(o, "terms");
    std::vector<TrigTerm> out;
    for (std::size_t i = 0; i < terms.size(); ++i) {
      Obj t(terms[i], item(o.sub("terms"), i));
      TrigTerm term;
      term.coef = t.number("coef");
      term.kx = t.integer("kx");
      term.ky = t.integer("ky");
      term.phase_x = t.number("phase_x", 0.0);
      term.phase_y = t.number("phase_y", 0.0);
      t.finish();
      out.push_back(term);
    }
    u = u + Potential(std::move(out));
  }
  o.finish();
  return u;
}

Manifold parse_manifold(const json& j, const std::string& path) {
  Obj o(j, path);
  const std::string type = o.string("type");
  std::optional<Manifold> m;
  if (type == "sphere") {
    const int n = o.integer("n");
    m = guarded(o.sub("n"), [&] { return Manifold::sphere(n); });
  } else if (type == "flat_torus") {
    std::vector<double> l = {2.0 * std::numbers::pi, 2.0 * std::numbers::pi};
    if (o.has("periods")) l = o.numbers("periods");
    if (l.size() != 2) fail(o.sub("periods"), "expected two periods");
    m = guarded(o.sub("periods"), [&] { return Manifold::flat_torus(l[0], l[1]); });
  } else if (type == "conformal_torus") {
    m = Manifold::conformal_torus(parse_potential(o.at("u"), o.sub("u")));
  } else {
    fail(o.sub("type"), "unknown manifold type '" + type + "'");
  }
  o.finish();
  return *m;
}

FieldSpec parse_field(const json& j, const std::string& path) {
  Obj o(j, path);
  const std::string type = o.string("type");
  auto build = [&]() -> FieldSpec {
    if (type == "conformal") return FieldSpec::conformal(to_vector(o.numbers("a")));
    if (type == "quadratic") {
      if (o.has("matrix")) {
        const json& rows = array_at(o, "matrix");
        Matrix mat(rows.size(), rows.size());
        for (std::size_t r = 0; r < rows.size(); ++r) {
          if (!rows[r].is_array() || rows[r].size() != rows.size()) {
            fail(item(o.sub("matrix"), r), "expected a square matrix");
          }
          for (std::size_t c = 0; c < rows.size(); ++c) mat(r, c) = rows[r][c].get<double>();
        }
        return FieldSpec::quadratic_from_matrix(mat);
      }
      const json& eigs = array_at(o, "eigs");
      std::vector<std::pair<double, int>> out;
      for (std::size_t i = 0; i < eigs.size(); ++i) {
        const json& e = eigs[i];
        if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number_integer()) {
          fail(item(o.sub("eigs"), i), "expected [eigenvalue, multiplicity]");
        }
        out.emplace_back(e[0].get<double>(), e[1].get<int>());
      }
      return FieldSpec::quadratic(std::move(out));
    }
    if (type == "killing") return FieldSpec::killing(o.numbers("thetas"));
    if (type == "hopf") {
      const int n = o.integer("n");
      if (n < 3 || n % 2 == 0) fail(o.sub("n"), "the Hopf field lives on odd spheres S^n, n >= 3");
      return FieldSpec::killing(std::vector<double>((n + 1) / 2, 1.0));
    }
    if (type == "parallel") return FieldSpec::parallel(to_vector(o.numbers("v")));
    if (type == "fourier") {
      const json& modes = array_at(o, "modes");
      std::vector<FourierMode> out;
      for (std::size_t i = 0; i < modes.size(); ++i) {
        Obj md(modes[i], item(o.sub("modes"), i));
        FourierMode f;
        f.component = md.integer("component");
        f.coef = md.number("coef");
        f.kx = md.integer("kx", 0);
        f.ky = md.integer("ky", 0);
        f.phase = md.number("phase", 0.0);
        md.finish();
        out.push_back(f);
      }
      return FieldSpec::fourier(std::move(out));
    }
    if (type == "normalized") return FieldSpec::normalized(parse_field(o.at("inner"), o.sub("inner")));
    if (type == "scaled") {
      const double factor = o.number("factor");
      return FieldSpec::scaled(parse_field(o.at("inner"), o.sub("inner")), factor);
    }
    fail(o.sub("type"), "unknown field type '" + type + "'");
  };
  FieldSpec f = guarded(path, build);
  o.finish();
  return f;
}

KKMetricSpec parse_metric(const json& j, const std::string& path) {
  if (j.is_string()) {
    return guarded(path, [&] { return preset(j.get<std::string>()); });
  }
  Obj o(j, path);
  const double t_max = o.number("t_max", 2.0);
  KKMetricSpec spec;
  if (o.has("preset")) {
    const std::string name = o.string("preset");
    std::map<std::string, double> params;
    for (const char* key : {"m", "r"}) {
      if (o.has(key)) params[key] = o.number(key);
    }
    spec = guarded(path, [&] { return preset(name, params, t_max); });
  } else {
    spec.name = o.string("name", "custom");
    if (o.has("A")) spec.A = parse_profile(o.at("A"), o.sub("A"));
    if (o.has("B")) spec.B = parse_profile(o.at("B"), o.sub("B"));
    if (o.has("C")) spec.C = parse_profile(o.at("C"), o.sub("C"));
    spec.t_max = t_max;
    const ValidationReport r = validate(spec);
    if (!r.ok) fail(path, "metric '" + spec.name + "' is not positive definite: " + r.message);
  }
  o.finish();
  return spec;
}

std::vector<KKMetricSpec> parse_sweep(const json& j, const std::string& path) {
  Obj o(j, path);
  auto range = [&](const std::string& key) {
    const std::vector<double> v = o.numbers(key);
    if (v.size() != 3 || v[2] < 1 || v[2] != std::floor(v[2])) {
      fail(o.sub(key), "expected [min, max, steps] with integer steps >= 1");
    }
    return v;
  };
  const auto beta = range("beta");
  const auto c = range("c");
  const double t_max = o.number("t_max", 2.0);
  o.finish();
  return candidate_grid(t_max, beta[0], beta[1], static_cast<int>(beta[2]), c[0], c[1],
                        static_cast<int>(c[2]));
}

ProfileProblem parse_problem(const json& j, const std::string& path) {
  Obj o(j, path);
  ProfileProblem p;
  const std::string family = o.string("family");
  p.family = guarded(o.sub("family"), [&] { return parse_profile_family(family); });
  p.n = o.integer("n");
  p.mu = o.number("mu", p.mu);
  p.k = o.integer("k", p.k);
  p.lambda = o.number("lambda", p.lambda);
  p.a_sq = o.number("a_sq", p.a_sq);
  if (o.has("thetas")) p.thetas = o.numbers("thetas");
  if (o.has("C")) p.C = parse_profile(o.at("C"), o.sub("C"));
  p.K = o.number("K", p.K);
  p.A0 = o.number("A0", p.A0);
  p.power_variant = o.boolean("power_variant", false);
  o.finish();
  guarded(path, [&] {
    require_well_formed(p);
    return 0;
  });
  return p;
}

FlowSchedule parse_schedule(const json& j, const std::string& path) {
  Obj o(j, path);
  FlowSchedule s;
  s.max_iterations = o.integer("max_iterations", s.max_iterations);
  s.initial_step = o.number("initial_step", s.initial_step);
  s.min_step = o.number("min_step", s.min_step);
  s.target_residual = o.number("target_residual", s.target_residual);
  s.history_stride = o.integer("history_stride", s.history_stride);
  o.finish();
  if (s.max_iterations < 0) fail(o.sub("max_iterations"), "must be >= 0");
  if (!(s.initial_step > 0.0)) fail(o.sub("initial_step"), "must be positive");
  if (s.history_stride < 1) fail(o.sub("history_stride"), "must be >= 1");
  return s;
}

std::vector<Assertion> parse_asserts(const json& j, const std::string& path) {
  Obj o(j, path);
  std::vector<Assertion> out;
  for (auto it = j.begin(); it != j.end(); ++it) {
    Obj cond(o.at(it.key()), o.sub(it.key()));
    for (const char* op : {"lt", "le", "gt", "ge"}) {
      if (cond.has(op)) out.push_back({it.key(), op, cond.number(op)});
    }
    cond.finish();
  }
  o.finish();
  return out;
}

CalculusPath parse_path(const std::string& s, const std::string& path) {
  if (s == "analytic") return CalculusPath::kAnalytic;
  if (s == "stencil") return CalculusPath::kStencil;
  fail(path, "expected 'analytic' or 'stencil'");
}

void require(bool ok, const std::string& path, const std::string& message) {
  if (!ok) fail(path, message);
}

CaseConfig parse_case(const json& j, const std::string& path) {
  Obj o(j, path);
  CaseConfig c;
  c.id = o.string("id");
  if (c.id.empty()) fail(o.sub("id"), "must not be empty");
  const std::string check = o.string("check");
  c.check = guarded(o.sub("check"), [&] { return parse_check(check); });
  c.expect = o.string("expect");
  if (o.has("note")) (void)o.string("note");
  if (o.has("assert")) c.asserts = parse_asserts(o.at("assert"), o.sub("assert"));
  if (o.has("manifold")) c.manifold = parse_manifold(o.at("manifold"), o.sub("manifold"));
  if (o.has("metric")) c.metrics.push_back(parse_metric(o.at("metric"), o.sub("metric")));
  if (o.has("metrics")) {
    const json& ms = array_at(o, "metrics");
    for (std::size_t i = 0; i < ms.size(); ++i) c.metrics.push_back(parse_metric(ms[i], item(o.sub("metrics"), i)));
  }
  if (o.has("sweep")) {
    auto grid = parse_sweep(o.at("sweep"), o.sub("sweep"));
    c.metrics.insert(c.metrics.end(), grid.begin(), grid.end());
  }
  if (o.has("field")) c.fields.push_back(parse_field(o.at("field"), o.sub("field")));
  if (o.has("fields")) {
    const json& fs = array_at(o, "fields");
    for (std::size_t i = 0; i < fs.size(); ++i) c.fields.push_back(parse_field(fs[i], item(o.sub("fields"), i)));
  }
  if (o.has("variation")) c.variation = parse_field(o.at("variation"), o.sub("variation"));
  if (o.has("problem")) c.problem = parse_problem(o.at("problem"), o.sub("problem"));
  if (o.has("mode")) {
    const std::string mode = o.string("mode");
    if (c.check == Check::kProfile) {
      require(mode == "closed_form" || mode == "ode", o.sub("mode"), "expected 'closed_form' or 'ode'");
      c.profile_mode = mode;
    } else if (c.check == Check::kDuality) {
      require(mode == "section" || mode == "map" || mode == "torus", o.sub("mode"),
              "expected 'section', 'map' or 'torus'");
      c.duality_mode = mode;
    } else {
      fail(o.sub("mode"), "only profile and duality checks take a mode");
    }
  }
  c.obstruction = o.string("obstruction", "");
  if (o.has("params")) {
    Obj p(o.at("params"), o.sub("params"));
    for (auto it = j.at("params").begin(); it != j.at("params").end(); ++it) c.params[it.key()] = p.number(it.key());
    p.finish();
  }
  if (o.has("thetas")) c.thetas = o.numbers("thetas");
  c.pairs = o.integer("pairs", c.pairs);
  if (o.has("resolutions")) {
    for (double r : o.numbers("resolutions")) {
      require(r >= 8 && r == std::floor(r), o.sub("resolutions"), "resolutions must be integers >= 8");
      c.resolutions.push_back(static_cast<int>(r));
    }
  }
  if (o.has("identities")) {
    const json& ids = array_at(o, "identities");
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (!ids[i].is_string()) fail(item(o.sub("identities"), i), "expected a string");
      c.identities.push_back(ids[i].get<std::string>());
    }
  }
  c.samples = o.integer("samples", c.samples);
  c.resolution = o.integer("resolution", c.resolution);
  c.runs = o.integer("runs", c.runs);
  c.random_sections = o.integer("random_sections", c.random_sections);
  c.tolerance = o.number("tolerance", c.tolerance);
  if (o.has("path")) c.path = parse_path(o.string("path"), o.sub("path"));
  if (o.has("profile")) c.profile = parse_profile(o.at("profile"), o.sub("profile"));
  c.k = o.number("k", c.k);
  if (o.has("u")) c.u = parse_potential(o.at("u"), o.sub("u"));
  c.exponent = o.number("exponent", c.exponent);
  if (o.has("schedule")) c.schedule = parse_schedule(o.at("schedule"), o.sub("schedule"));
  o.finish();

  require(c.samples >= 1, o.sub("samples"), "must be >= 1");
  require(c.resolution >= 2, o.sub("resolution"), "must be >= 2");
  require(c.runs >= 1, o.sub("runs"), "must be >= 1");
  require(c.pairs >= 1, o.sub("pairs"), "must be >= 1");
  require(c.random_sections >= 0, o.sub("random_sections"), "must be >= 0");
  require(c.tolerance > 0.0, o.sub("tolerance"), "must be positive");

  auto need_manifold = [&] { require(c.manifold.has_value(), o.sub("manifold"), "required for this check"); };
  auto need_metric = [&] { require(!c.metrics.empty(), o.sub("metric"), "required for this check"); };
  auto need_field = [&] { require(!c.fields.empty(), o.sub("field"), "required for this check"); };
  auto need_torus = [&] {
    need_manifold();
    require(c.manifold->is_torus(), o.sub("manifold"), "this check runs on a torus");
  };
  auto fields_fit = [&] {
    for (std::size_t i = 0; i < c.fields.size(); ++i) {
      guarded(o.sub("field"), [&] {
        require_compatible(*c.manifold, c.fields[i]);
        return 0;
      });
    }
  };
  switch (c.check) {
    case Check::kTension:
    case Check::kIdentity:
      need_manifold(), need_metric(), need_field(), fields_fit();
      break;
    case Check::kKoszul:
      need_manifold(), need_metric();
      require(c.manifold->is_sphere(), o.sub("manifold"), "the Koszul test runs on spheres");
      break;
    case Check::kProfile:
      require(c.problem.has_value(), o.sub("problem"), "required for profile checks");
      break;
    case Check::kObstruction:
      if (c.obstruction == "quadratic_eigen_structure") {
        need_manifold(), need_field(), fields_fit();
      } else {
        require(!c.obstruction.empty() || c.problem.has_value(), o.sub("obstruction"),
                "name an obstruction case or give a problem");
      }
      break;
    case Check::kConformalDefect:
      need_manifold(), need_metric(), need_field(), fields_fit();
      require(c.fields[0].get_if<FieldSpec::Conformal>() != nullptr, o.sub("field"),
              "the conformal defect needs a conformal field");
      break;
    case Check::kSweep:
      need_manifold(), need_field(), fields_fit();
      require(!c.metrics.empty(), o.sub("sweep"), "no valid candidate metrics");
      break;
    case Check::kYano:
      need_manifold(), need_field(), fields_fit();
      break;
    case Check::kDuality:
      need_manifold(), need_metric(), need_field(), fields_fit();
      if (c.duality_mode == "torus") {
        need_torus();
        require(!c.resolutions.empty(), o.sub("resolutions"), "required for torus duality");
      } else {
        require(c.variation.has_value(), o.sub("variation"), "required for section and map duality");
        guarded(o.sub("variation"), [&] {
          require_compatible(*c.manifold, *c.variation);
          return 0;
        });
      }
      break;
    case Check::kFlow:
      need_torus(), need_metric();
      break;
    case Check::kConformalEnergy:
      need_torus(), need_metric(), fields_fit();
      require(!c.fields.empty() || c.random_sections > 0, o.sub("fields"),
              "give unit fields or random_sections");
      break;
    case Check::kConstantNorm:
      require(c.profile.has_value(), o.sub("profile"), "required for constant_norm checks");
      break;
  }
  return c;
}

}  // namespace

std::string to_string(Check c) {
  switch (c) {
    case Check::kTension: return "tension";
    case Check::kKoszul: return "koszul";
    case Check::kProfile: return "profile";
    case Check::kObstruction: return "obstruction";
    case Check::kConformalDefect: return "conformal_defect";
    case Check::kSweep: return "sweep";
    case Check::kIdentity: return "identity";
    case Check::kYano: return "yano";
    case Check::kDuality: return "duality";
    case Check::kFlow: return "flow";
    case Check::kConformalEnergy: return "conformal_energy";
    case Check::kConstantNorm: return "constant_norm";
  }
  return "unknown";
}

Check parse_check(const std::string& name) {
  for (int i = 0; i <= static_cast<int>(Check::kConstantNorm); ++i) {
    if (to_string(static_cast<Check>(i)) == name) return static_cast<Check>(i);
  }
  throw InvalidInput("unknown check '" + name + "'");
}

bool Assertion::holds(double x) const {
  if (op == "lt") return x < value;
  if (op == "le") return x <= value;
  if (op == "gt") return x > value;
  if (op == "ge") return x >= value;
  return false;
}

std::string Assertion::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << metric << " " << op << " " << value;
  return os.str();
}

SuiteConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidInput(std::string("config: not valid JSON (") + e.what() + ")");
  }
  Obj o(j, "");
  SuiteConfig cfg;
  const std::string schema = o.string("schema", kConfigSchema);
  if (schema != kConfigSchema) fail("schema", "unsupported schema '" + schema + "'");
  cfg.name = o.string("name", cfg.name);
  if (o.has("seed")) {
    const json& s = o.at("seed");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0)) {
      fail("seed", "expected a non-negative integer");
    }
    cfg.seed = s.get<std::uint64_t>();
  }
  cfg.output_dir = o.string("output", "");
  if (o.has("cases")) {
    const json& cases = array_at(o, "cases");
    std::set<std::string> ids;
    for (std::size_t i = 0; i < cases.size(); ++i) {
      CaseConfig c = parse_case(cases[i], item("cases", i));
      if (!ids.insert(c.id).second) fail(item("cases", i) + ".id", "duplicate id '" + c.id + "'");
      cfg.cases.push_back(std::move(c));
    }
  }
  o.finish();
  return cfg;
}

SuiteConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput(path + ": cannot open config");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace kkharm::suite
