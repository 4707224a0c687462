#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace truecal {

inline constexpr const char* kVersion = "0.1.0";

/// Names accepted in the "experiment" field of a config.
std::vector<std::string> experiment_names();

/// Parses a JSON config, runs the experiment named by its "experiment" field
/// and returns the JSON report (pretty-printed, deterministic for a given
/// config). Throws Error{ConfigInvalid} on malformed configs; errors raised by
/// the experiment itself (e.g. BudgetExceeded) propagate unchanged.
std::string run_experiment(std::string_view config_json);

}  // namespace truecal
