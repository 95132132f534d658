#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hsheat/params.hpp"
#include "hsheat/solver.hpp"

namespace hsheat {

inline const std::vector<std::string> kCommands{"constants", "eigen",  "minimize",  "ground-state",
                                                "shoot",     "pohozaev", "sweep-eps", "evolve"};

struct GridSpec {
    double R_max = 16.0;
    int M = 4000;
    double grading = 2.0;
};

struct MinimizeSpec {
    bool weighted = true;
    std::vector<double> alphas;  ///< empty: params.alpha only
    MinimizeOptions options;
};

struct SweepSpec {
    std::vector<double> eps;
    std::vector<double> alphas;
    std::string variant = "general";
};

struct ShootSpec {
    double d0_lo = 1e-2;
    double d0_hi = 1e3;
    int samples = 61;
    int max_nodes = 1;
};

struct PohozaevSpec {
    std::optional<std::string> field;  ///< `r,value` CSV on the configured grid
    double tolerance = 1e-2;
};

struct EvolveSpec {
    double t0 = 1.0;
    double t1 = 2.0;
    double dt0 = 1e-3;
    std::vector<double> outputs;    ///< empty: {t1}
    std::vector<double> snapshots;  ///< subset of outputs written under fields/
    int M = 2000;
    double grading = 2.0;
    std::optional<double> R_phys;   ///< default 2·R_max·√t1
    std::string initial = "ground_state";  ///< or "gaussian"
    double sigma = 1.0;             ///< gaussian start e^{-r²/(4σ)}
    bool reaction = true;
    double tolerance = 2e-2;        ///< selfsim_error threshold at t1
};

struct ConstantsSpec {
    std::vector<double> hardy_eps{0.5, 0.2, 0.1, 0.05};
};

/// Validated run description; reproducible from its JSON echo.
struct RunConfig {
    std::string command;
    ProblemParams params;
    GridSpec grid;
    std::uint64_t seed = 12345;
    ConstantsSpec constants;
    MinimizeSpec minimize;
    SweepSpec sweep;
    ShootSpec shoot;
    PohozaevSpec pohozaev;
    EvolveSpec evolve;
};

/**
 * Parses and validates a config document for `command`. Every section is
 * optional except `params`; unknown keys are rejected. Throws ConfigError
 * whose message names the offending field.
 */
RunConfig parse_config(const nlohmann::json& j, const std::string& command);

/// Echo with all defaults filled in.
nlohmann::json to_json(const RunConfig& c);

}  // namespace hsheat
