#pragma once

#include "cli/config.hpp"

#include "levyflat/invariance.hpp"
#include "levyflat/models.hpp"

#include <nlohmann/json.hpp>

#include <iosfwd>
#include <string>

namespace levyflat::cli {

enum ExitCode : int { kExitPass = 0, kExitFail = 1, kExitConfig = 2, kExitNumeric = 3 };

ModelInstance make_model(const RunConfig& config);

nlohmann::json to_json(const TestReport& report);
nlohmann::json to_json(const FlatnessReport& report);

/// Runs the selected tests and returns the report document (without writing
/// anything). Throws ConfigError / NumericError and friends.
nlohmann::json execute(const RunConfig& config, std::ostream& log, std::vector<MildPath>* kept_paths = nullptr);

/// execute + output files; library errors are mapped to exit codes and
/// their messages go to `err`.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Report with the timestamp field removed, for byte comparisons.
std::string strip_timestamp(const std::string& report_text);

}  // namespace levyflat::cli
