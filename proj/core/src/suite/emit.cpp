#include "kkharm/suite/emit.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "kkharm/util/errors.hpp"

namespace kkharm::suite {
namespace {

using json = nlohmann::json;

std::string quote(const std::string& s) { return json(s).dump(); }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

// Minimal pretty printer with a fixed key order.
class Writer {
 public:
  std::string str() const { return os_.str(); }

  void open(char bracket) {
    os_ << bracket;
    ++depth_;
    first_ = true;
  }
  void close(char bracket) {
    --depth_;
    if (!first_) newline();
    os_ << bracket;
    first_ = false;
  }
  void key(const std::string& k) {
    item();
    os_ << quote(k) << ": ";
  }
  void item() {
    if (!first_) os_ << ',';
    newline();
    first_ = false;
  }
  // Values that follow key() need no separator.
  void value(const std::string& s) { os_ << s; }

  void field(const std::string& k, const std::string& v) { key(k), value(quote(v)); }
  void field(const std::string& k, double v) { key(k), value(number(v)); }
  void field(const std::string& k, bool v) { key(k), value(v ? "true" : "false"); }

  static std::string number(double v) {
    if (!std::isfinite(v)) return quote(format_number(v));
    return format_number(v);
  }

 private:
  void newline() {
    os_ << '\n';
    for (int i = 0; i < depth_; ++i) os_ << "  ";
  }
  std::ostringstream os_;
  int depth_ = 0;
  bool first_ = true;
};

double json_number(const json& v) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s == "nan") return NAN;
    if (s == "inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
  }
  throw InvalidInput("report: expected a number, got " + v.dump());
}

}  // namespace

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0.0) return "0";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string to_json(const Report& r) {
  Writer w;
  w.open('{');
  w.field("schema", r.schema);
  w.field("suite", r.suite);
  w.key("seed");
  w.value(std::to_string(r.seed));
  w.key("environment");
  w.open('{');
  w.field("library", r.environment.library);
  w.field("version", r.environment.version);
  w.field("compiler", r.environment.compiler);
  w.field("eigen", r.environment.eigen);
  w.field("rng", r.environment.rng);
  w.close('}');
  int matched = 0;
  for (const auto& c : r.cases) matched += c.match ? 1 : 0;
  w.key("summary");
  w.open('{');
  w.key("cases");
  w.value(std::to_string(r.cases.size()));
  w.key("matched");
  w.value(std::to_string(matched));
  w.field("all_match", r.all_match());
  w.close('}');
  w.key("cases");
  w.open('[');
  for (const auto& c : r.cases) {
    w.item();
    w.open('{');
    w.field("id", c.id);
    w.field("check", c.check);
    w.field("expect", c.expect);
    w.field("verdict", c.verdict);
    w.field("match", c.match);
    w.field("error", c.error);
    w.key("metrics");
    w.open('{');
    for (const auto& [k, v] : c.metrics) w.field(k, v);
    w.close('}');
    w.key("details");
    w.open('{');
    for (const auto& [k, v] : c.details) w.field(k, v);
    w.close('}');
    w.key("failed_assertions");
    w.open('[');
    for (const auto& a : c.failed_assertions) w.item(), w.value(quote(a));
    w.close(']');
    w.key("tables");
    w.open('[');
    for (const auto& t : c.tables) {
      w.item();
      w.open('{');
      w.field("name", t.name);
      w.key("columns");
      std::string cols = "[";
      for (std::size_t i = 0; i < t.columns.size(); ++i) cols += (i ? ", " : "") + quote(t.columns[i]);
      w.value(cols + "]");
      w.key("rows");
      w.open('[');
      for (const auto& row : t.rows) {
        w.item();
        std::string line = "[";
        for (std::size_t i = 0; i < row.size(); ++i) line += (i ? ", " : "") + Writer::number(row[i]);
        w.value(line + "]");
      }
      w.close(']');
      w.close('}');
    }
    w.close(']');
    w.close('}');
  }
  w.close(']');
  w.close('}');
  return w.str() + "\n";
}

std::string to_csv(const Report& r) {
  std::ostringstream os;
  os << "id,check,expect,verdict,match,metrics,failed_assertions,error\n";
  for (const auto& c : r.cases) {
    std::string metrics;
    for (const auto& [k, v] : c.metrics) metrics += (metrics.empty() ? "" : ";") + k + "=" + format_number(v);
    std::string failed;
    for (const auto& a : c.failed_assertions) failed += (failed.empty() ? "" : ";") + a;
    os << csv_field(c.id) << ',' << csv_field(c.check) << ',' << csv_field(c.expect) << ','
       << csv_field(c.verdict) << ',' << (c.match ? "true" : "false") << ',' << csv_field(metrics) << ','
       << csv_field(failed) << ',' << csv_field(c.error) << '\n';
  }
  return os.str();
}

std::string table_csv(const Table& t) {
  std::ostringstream os;
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << csv_field(t.columns[i]);
  os << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_number(row[i]);
    os << '\n';
  }
  return os.str();
}

Report report_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidInput(std::string("report: not valid JSON (") + e.what() + ")");
  }
  try {
    Report r;
    r.schema = j.at("schema").get<std::string>();
    if (r.schema != kReportSchema) throw InvalidInput("report: unsupported schema '" + r.schema + "'");
    r.suite = j.at("suite").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    const json& env = j.at("environment");
    r.environment.library = env.at("library").get<std::string>();
    r.environment.version = env.at("version").get<std::string>();
    r.environment.compiler = env.at("compiler").get<std::string>();
    r.environment.eigen = env.at("eigen").get<std::string>();
    r.environment.rng = env.at("rng").get<std::string>();
    for (const json& cj : j.at("cases")) {
      CaseResult c;
      c.id = cj.at("id").get<std::string>();
      c.check = cj.at("check").get<std::string>();
      c.expect = cj.at("expect").get<std::string>();
      c.verdict = cj.at("verdict").get<std::string>();
      c.match = cj.at("match").get<bool>();
      c.error = cj.at("error").get<std::string>();
      for (auto it = cj.at("metrics").begin(); it != cj.at("metrics").end(); ++it) {
        c.metrics[it.key()] = json_number(it.value());
      }
      for (auto it = cj.at("details").begin(); it != cj.at("details").end(); ++it) {
        c.details[it.key()] = it.value().get<std::string>();
      }
      for (const json& a : cj.at("failed_assertions")) c.failed_assertions.push_back(a.get<std::string>());
      for (const json& tj : cj.at("tables")) {
        Table t;
        t.name = tj.at("name").get<std::string>();
        t.columns = tj.at("columns").get<std::vector<std::string>>();
        for (const json& row : tj.at("rows")) {
          std::vector<double> values;
          for (const json& v : row) values.push_back(json_number(v));
          t.rows.push_back(std::move(values));
        }
        c.tables.push_back(std::move(t));
      }
      r.cases.push_back(std::move(c));
    }
    return r;
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("report: malformed (") + e.what() + ")");
  }
}

void write_file(const std::string& path, const std::string& text) {
  const std::filesystem::path p(path);
  std::error_code ec;
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path(), ec);
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(path + ": cannot open for writing");
  out << text;
  out.close();
  if (!out) throw Error(path + ": write failed");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(path + ": cannot open for reading");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace kkharm::suite
