#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "hsheat/config.hpp"
#include "hsheat/field.hpp"
#include "hsheat/io.hpp"

namespace hsheat {

/// One thresholded quantity. Advisory checks only gate the exit status under --strict.
struct Check {
    std::string name;
    double value = 0.0;
    std::string relation;  ///< "<=", "<", ">=", ">", "=="
    double threshold = 0.0;
    bool pass = false;
    bool advisory = false;
};

struct RunResult {
    nlohmann::json report;
    std::vector<Check> checks;
    std::vector<std::pair<std::string, CsvWriter>> tables;     ///< file name → table
    std::vector<std::pair<std::string, RadialField>> fields;   ///< written under fields/
    std::vector<std::string> row_failures;                      ///< sweep rows with status != ok
};

/// Runs the configured subcommand; sweeps use up to `jobs` worker threads.
RunResult run_command(const RunConfig& config, int jobs);

/// Threshold checks pass; with `strict`, advisory checks and every sweep row too.
bool run_passed(const RunResult& r, bool strict);

nlohmann::json to_json(const Check& c);

}  // namespace hsheat
