#pragma once

#include <string>

#include "kkharm/suite/report.hpp"

namespace kkharm::suite {

/// Decimal with 17 significant digits; "nan", "inf" and "-inf" as strings.
std::string format_number(double x);

/// One object with keys in a fixed order and a "cases" array.
std::string to_json(const Report& r);

/// Header id,check,expect,verdict,match,metrics,failed_assertions,error and
/// one row per case; metrics packed as name=value pairs joined by ';'.
std::string to_csv(const Report& r);

/// columns header then rows, numbers via format_number.
std::string table_csv(const Table& t);

/// Inverse of to_json (tables included).
Report report_from_json(const std::string& text);

/// Writes text to path, creating parent directories. Throws Error when the
/// path is not writable.
void write_file(const std::string& path, const std::string& text);
std::string read_file(const std::string& path);

}  // namespace kkharm::suite
