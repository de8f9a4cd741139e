#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace rshock {

enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitSolver = 2, kExitAssert = 3 };

/// Names accepted in the "experiment" field.
std::vector<std::string> experiment_names();

/// Applies `key=value` overrides; keys are dotted paths, values are parsed as
/// JSON when possible and kept as strings otherwise.
nlohmann::json apply_overrides(nlohmann::json config, const std::vector<std::string>& sets);

/// Runs one experiment and writes its CSVs, checks.csv, params.json and
/// manifest.json into config["output_dir"]. Progress and failures go to `log`.
/// Returns an ExitCode; kExitAssert only when assert_mode is set.
int run_experiment(const nlohmann::json& config, bool assert_mode, std::ostream& log);

/// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::string& path);

}  // namespace rshock
