// kkharm: run verification suites and render their reports.

#include <filesystem>
#include <iostream>
#include <optional>
#include <set>
#include <string>

#include "CLI11.hpp"
#include "kkharm/suite/config.hpp"
#include "kkharm/suite/emit.hpp"
#include "kkharm/suite/runner.hpp"
#include "kkharm/util/errors.hpp"

namespace fs = std::filesystem;
using namespace kkharm;
using namespace kkharm::suite;

namespace {

constexpr int kExitMismatch = 1;
constexpr int kExitUsage = 2;

struct RunOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  bool quiet = false;
};

std::string table_file(const CaseResult& c, const Table& t) { return c.id + "__" + t.name + ".csv"; }

int run(const RunOptions& opt, const std::string& stem, const CaseFilter& filter) {
  SuiteConfig cfg = load_config(opt.config);
  if (opt.seed) cfg.seed = *opt.seed;
  std::string dir = opt.out;
  if (dir.empty()) dir = cfg.output_dir.empty() ? "kkharm-out" : cfg.output_dir;

  const Report report = run_suite(cfg, filter);
  write_file((fs::path(dir) / (stem + ".json")).string(), to_json(report));
  write_file((fs::path(dir) / (stem + ".csv")).string(), to_csv(report));
  for (const auto& c : report.cases) {
    for (const auto& t : c.tables) write_file((fs::path(dir) / "tables" / table_file(c, t)).string(), table_csv(t));
  }
  int matched = 0;
  for (const auto& c : report.cases) {
    matched += c.match ? 1 : 0;
    if (opt.quiet && c.match) continue;
    std::cout << (c.match ? "MATCH    " : "MISMATCH ") << c.id << ": " << c.verdict;
    if (!c.match) {
      std::cout << " (expected " << c.expect << ")";
      for (const auto& a : c.failed_assertions) std::cout << "\n    failed: " << a;
      if (!c.error.empty()) std::cout << "\n    error: " << c.error;
    }
    std::cout << '\n';
  }
  std::cout << matched << "/" << report.cases.size() << " cases match; report in " << dir << "/" << stem
            << ".json\n";
  return report.all_match() ? 0 : kExitMismatch;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kaluza-Klein harmonicity engine: verification suites for vector fields as maps into TM"};
  app.require_subcommand(1);

  RunOptions opt;
  auto add_run_options = [&](CLI::App* sub) {
    sub->add_option("config", opt.config, "suite config (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", opt.seed, "override the config seed");
    sub->add_option("--out", opt.out, "output directory (default: config 'output' or ./kkharm-out)");
    sub->add_flag("--quiet", opt.quiet, "print mismatches only");
  };
  auto* verify = app.add_subcommand("verify", "run every case of a suite");
  add_run_options(verify);
  auto* scan = app.add_subcommand("scan", "run profile, sweep and obstruction cases; export profile tables");
  add_run_options(scan);
  auto* flow = app.add_subcommand("flow", "run the torus flow cases; export flow histories");
  add_run_options(flow);

  std::string report_path;
  std::string format = "json";
  std::string report_output;
  auto* report = app.add_subcommand("report", "re-render a run directory (or report.json) as json or csv");
  report->add_option("dir", report_path, "run directory or report file")->required();
  report->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  report->add_option("--output", report_output, "write to this file instead of stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*verify) return run(opt, "report", {});
    if (*scan) {
      const std::set<Check> kinds = {Check::kProfile, Check::kSweep, Check::kObstruction, Check::kConformalDefect,
                                     Check::kConstantNorm};
      return run(opt, "scan", [&](const CaseConfig& c) { return kinds.count(c.check) > 0; });
    }
    if (*flow) return run(opt, "flow", [](const CaseConfig& c) { return c.check == Check::kFlow; });
    if (*report) {
      fs::path p(report_path);
      if (fs::is_directory(p)) p /= "report.json";
      const Report r = report_from_json(read_file(p.string()));
      const std::string text = format == "csv" ? to_csv(r) : to_json(r);
      if (report_output.empty()) {
        std::cout << text;
      } else {
        write_file(report_output, text);
      }
      return 0;
    }
  } catch (const InvalidInput& e) {
    std::cerr << "kkharm: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "kkharm: " << e.what() << '\n';
    return kExitUsage;
  }
  return 0;
}
