#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>
#include <Eigen/Core>
#include <boost/version.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "hsheat/commands.hpp"
#include "hsheat/config.hpp"
#include "hsheat/io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitChecksFailed = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

constexpr const char* kConfigHelp = R"(Config: one JSON document. Only "params" is required.
  params    {"N": int >= 3, "s": [0,2), "q": (2, 2*(s)] or omitted for 2*(s), "alpha": 0}
  grid      {"R_max": 16, "M": 4000, "grading": 2}
  seed      12345 (random competitor fields)
  constants {"hardy_eps": [0.5, 0.2, 0.1, 0.05]}
  minimize  {"weighted": true, "alphas": [params.alpha], "grad_tol": 1e-6,
             "change_tol": 1e-8, "max_iter": 100000}
  sweep     {"eps": [...] or {"lo": 1e-4, "hi": 0.1, "n": 13}, "alphas": [params.alpha],
             "variant": "general" | "dim3"}
  shoot     {"d0_lo": 0.01, "d0_hi": 1000, "samples": 61, "max_nodes": 1}
  pohozaev  {"field": csv path (default: computed), "tolerance": 0.01}
  evolve    {"t0": 1, "t1": 2, "dt0": 1e-3, "outputs": [t1], "snapshots": [],
             "M": 2000, "grading": 2, "R_phys": 2*R_max*sqrt(t1),
             "initial": "ground_state" | "gaussian", "sigma": 1, "reaction": true,
             "tolerance": 0.02}
Output: report.json, manifest.json, *.csv and fields/*.csv in --out (or $HSHEAT_OUT).
Exit status: 0 all threshold checks pass, 1 a check failed, 2 invalid config,
3 numerical failure. --strict also fails on advisory checks and failed sweep rows.)";

std::string utc_now() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

json versions() {
    return {{"hsheat", "1.0.0"},
            {"compiler", __VERSION__},
            {"boost", BOOST_LIB_VERSION},
            {"eigen", fmt::format("{}.{}.{}", EIGEN_WORLD_VERSION, EIGEN_MAJOR_VERSION, EIGEN_MINOR_VERSION)},
            {"fmt", FMT_VERSION},
            {"nlohmann_json", fmt::format("{}.{}.{}", NLOHMANN_JSON_VERSION_MAJOR, NLOHMANN_JSON_VERSION_MINOR,
                                          NLOHMANN_JSON_VERSION_PATCH)},
            {"cli11", CLI11_VERSION}};
}

json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw hsheat::ConfigError(fmt::format("--config: cannot read {}", path));
    }
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw hsheat::ConfigError(fmt::format("--config: {}", e.what()));
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Radial solvers for -Δv - y·∇v/2 = αv + |v|^{q-2}v|y|^{-s} and its parabolic flow"};
    app.footer(kConfigHelp);
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::string out_dir;
    int jobs = 1;
    bool strict = false;
    app.add_option("--config", config_path, "JSON run configuration")->required();
    app.add_option("--out", out_dir, "output directory (default $HSHEAT_OUT, else runs/<command>)");
    app.add_option("--jobs", jobs, "worker threads for sweeps")->check(CLI::PositiveNumber);
    app.add_flag("--strict", strict, "nonzero exit on advisory misses and failed sweep rows");

    const std::vector<std::pair<std::string, std::string>> commands{
        {"constants", "λ₁, Hardy ratios, moments A0..A4 and the two S₀ routes"},
        {"eigen", "first eigenpair of L"},
        {"minimize", "critical quotient minimization (weighted or unweighted, α list)"},
        {"ground-state", "subcritical Nehari ground state"},
        {"shoot", "radial shooting ladder with node counting"},
        {"pohozaev", "Pohozaev certificate on a given or computed field"},
        {"sweep-eps", "comparison-family quotient over ε and its expansion fit"},
        {"evolve", "parabolic run and self-similarity report"},
    };
    for (const auto& [name, help] : commands) {
        app.add_subcommand(name, help);
    }
    CLI11_PARSE(app, argc, argv);
    const std::string command = app.get_subcommands().front()->get_name();

    const auto started = std::chrono::steady_clock::now();
    hsheat::RunConfig config;
    try {
        config = hsheat::parse_config(load_config(config_path), command);
    } catch (const hsheat::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    }

    if (out_dir.empty()) {
        const char* env = std::getenv("HSHEAT_OUT");
        out_dir = env && *env ? env : fmt::format("runs/{}", command);
    }

    hsheat::RunResult result;
    int status = 0;
    std::string error;
    try {
        result = hsheat::run_command(config, jobs);
        status = hsheat::run_passed(result, strict) ? 0 : kExitChecksFailed;
    } catch (const hsheat::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        error = e.what();
        status = kExitNumerical;
        result.report = {{"command", command}, {"error", error}, {"pass", false}};
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

    const fs::path out(out_dir);
    std::vector<std::string> artifacts{"report.json"};
    try {
        fs::create_directories(out);
        hsheat::write_json(out / "report.json", result.report);
        for (const auto& [name, table] : result.tables) {
            table.write(out / name);
            artifacts.push_back(name);
        }
        for (const auto& [name, field] : result.fields) {
            hsheat::write_field_csv(out / "fields" / name, field);
            artifacts.push_back("fields/" + name);
        }
        std::vector<std::string> args(argv, argv + argc);
        hsheat::write_json(out / "manifest.json", {{"config", hsheat::to_json(config)},
                                                   {"versions", versions()},
                                                   {"argv", args},
                                                   {"jobs", jobs},
                                                   {"strict", strict},
                                                   {"started_utc", utc_now()},
                                                   {"wall_seconds", wall},
                                                   {"exit_status", status},
                                                   {"artifacts", artifacts}});
    } catch (const std::exception& e) {
        std::cerr << "cannot write artifacts: " << e.what() << '\n';
        return kExitNumerical;
    }

    for (const auto& ch : result.checks) {
        std::cout << fmt::format("{:<4} {:<44} {:.6g} {} {:.6g}{}\n", ch.pass ? "ok" : "MISS", ch.name, ch.value,
                                 ch.relation, ch.threshold, ch.advisory ? "  (advisory)" : "");
    }
    for (const auto& f : result.row_failures) {
        std::cout << "row  " << f << '\n';
    }
    if (!error.empty()) {
        std::cerr << "numerical failure: " << error << '\n';
    }
    std::cout << fmt::format("{} -> {} (exit {}, {:.2f} s)\n", command, out.string(), status, wall);
    return status;
}
