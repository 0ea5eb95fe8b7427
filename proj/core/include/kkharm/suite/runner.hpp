#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "kkharm/suite/config.hpp"
#include "kkharm/suite/report.hpp"

namespace kkharm::suite {

/// Which cases a command evaluates.
using CaseFilter = std::function<bool(const CaseConfig&)>;

/// Evaluates one case. Errors raised by the engine are recorded in the
/// result, never propagated.
CaseResult run_case(const CaseConfig& c, std::uint64_t suite_seed);

/// Runs the selected cases concurrently and returns them sorted by id.
Report run_suite(const SuiteConfig& config, const CaseFilter& filter = {});

}  // namespace kkharm::suite
