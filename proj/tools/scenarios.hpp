#pragma once

#include "report.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace startrace::cli {

struct Scenario {
    std::string name;
    int n = 1;
    int order = 6;
    std::uint64_t seed = 1;
    /// Overrides the numeric tolerance of grid and bigfloat scenarios; exact scenarios always require 0.
    std::optional<double> tolerance;
    std::string equiv_file;
    std::string grid_file;
    std::string probes_file;
};

struct ScenarioInfo {
    std::string name;
    std::string summary;
};

const std::vector<ScenarioInfo>& scenario_list();

/// Deterministic for a fixed scenario. Throws InputError for unknown names, bad
/// parameters or unreadable files; per-case failures are reported in the cases.
Report run_scenario(const Scenario& s);

}  // namespace startrace::cli
