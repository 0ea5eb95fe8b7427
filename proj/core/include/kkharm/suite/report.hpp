#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace kkharm::suite {

inline constexpr const char* kReportSchema = "kkharm-report/1";

/// Plot-ready numeric table (profile samples, flow histories).
struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct CaseResult {
  std::string id;
  std::string check;
  std::string expect;
  std::string verdict;
  /// verdict == expect and every assertion holds.
  bool match = false;
  std::map<std::string, double> metrics;
  std::map<std::string, std::string> details;
  std::vector<std::string> failed_assertions;
  /// Set when the case raised instead of producing a verdict.
  std::string error;
  std::vector<Table> tables;
};

/// Build facts only, so equal inputs give equal reports.
struct Environment {
  std::string library = "kkharm";
  std::string version;
  std::string compiler;
  std::string eigen;
  std::string rng;
};

Environment current_environment();

struct Report {
  std::string schema = kReportSchema;
  std::string suite;
  std::uint64_t seed = 0;
  Environment environment;
  /// Sorted by id.
  std::vector<CaseResult> cases;

  bool all_match() const;
};

}  // namespace kkharm::suite
