#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kkharm/energy/flow.hpp"
#include "kkharm/fields/field_spec.hpp"
#include "kkharm/geometry/calculus.hpp"
#include "kkharm/geometry/manifold.hpp"
#include "kkharm/metric/kk_metric.hpp"
#include "kkharm/profile/solver.hpp"

namespace kkharm::suite {

inline constexpr const char* kConfigSchema = "kkharm-suite/1";

/// Kinds of case. Each reads a subset of CaseConfig; docs/config.md lists
/// which keys apply to which check.
enum class Check {
  kTension,
  kKoszul,
  kProfile,
  kObstruction,
  kConformalDefect,
  kSweep,
  kIdentity,
  kYano,
  kDuality,
  kFlow,
  kConformalEnergy,
  kConstantNorm,
};

std::string to_string(Check c);
Check parse_check(const std::string& name);

/// metric <op> value, op one of lt, le, gt, ge.
struct Assertion {
  std::string metric;
  std::string op;
  double value = 0.0;

  bool holds(double x) const;
  std::string describe() const;
};

struct CaseConfig {
  std::string id;
  Check check = Check::kTension;
  std::string expect;
  std::vector<Assertion> asserts;

  std::optional<Manifold> manifold;
  std::vector<KKMetricSpec> metrics;
  std::vector<FieldSpec> fields;
  std::optional<FieldSpec> variation;
  std::optional<ProfileProblem> problem;
  /// "closed_form" or "ode" (profile checks).
  std::string profile_mode = "closed_form";

  /// Obstruction certificates.
  std::string obstruction;
  std::map<std::string, double> params;
  std::vector<double> thetas;

  /// Duality: "section", "map" or "torus".
  std::string duality_mode = "section";
  int pairs = 10;
  std::vector<int> resolutions;

  std::vector<std::string> identities;
  int samples = 100;
  int resolution = 32;
  int runs = 1;
  /// Random unit sections generated in addition to `fields`.
  int random_sections = 0;
  double tolerance = 1e-8;
  CalculusPath path = CalculusPath::kAnalytic;

  /// Constant-norm condition.
  std::optional<ScalarProfile> profile;
  double k = 1.0;

  /// Conformal change.
  Potential u;
  double exponent = -1.0;

  FlowSchedule schedule;
};

struct SuiteConfig {
  std::string name = "suite";
  std::uint64_t seed = 1;
  std::string output_dir;
  std::vector<CaseConfig> cases;
};

/// Parses and validates a suite config. Throws InvalidInput whose message
/// starts with the JSON path of the offending key, e.g.
/// "cases[2].field.type: unknown field type 'foo'".
SuiteConfig parse_config(const std::string& text);
SuiteConfig load_config(const std::string& path);

}  // namespace kkharm::suite
