#include "hsheat/config.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <fmt/format.h>

#include "hsheat/bubbles.hpp"
#include "hsheat/grid.hpp"
#include "hsheat/selfsim.hpp"

namespace hsheat {

namespace {

using nlohmann::json;

void reject_unknown(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
    if (!j.is_object()) {
        throw ConfigError(fmt::format("{}: expected an object", where));
    }
    const std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& [k, v] : j.items()) {
        if (!allowed.contains(k)) {
            throw ConfigError(fmt::format("{}.{}: unknown key", where, k));
        }
    }
}

template <class T>
void read(const json& j, const char* key, const std::string& where, T& out) {
    if (!j.contains(key)) {
        return;
    }
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(fmt::format("{}.{}: wrong type ({})", where, key, j.at(key).dump()));
    }
}

template <class T>
T require(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) {
        throw ConfigError(fmt::format("{}.{}: required", where, key));
    }
    T out{};
    read(j, key, where, out);
    return out;
}

void positive(double x, const std::string& field) {
    if (!(x > 0.0) || !std::isfinite(x)) {
        throw ConfigError(fmt::format("{}: must be positive (got {})", field, x));
    }
}

// Either a list or {"lo", "hi", "n"} on a log scale.
std::vector<double> read_eps(const json& j, const std::string& where) {
    if (j.is_array()) {
        std::vector<double> v;
        read(json{{"eps", j}}, "eps", where, v);
        return v;
    }
    reject_unknown(j, where, {"lo", "hi", "n"});
    const auto lo = require<double>(j, "lo", where);
    const auto hi = require<double>(j, "hi", where);
    const auto n = require<int>(j, "n", where);
    if (!(lo > 0.0 && hi > lo) || n < 2) {
        throw ConfigError(fmt::format("{}: need 0 < lo < hi and n >= 2", where));
    }
    return log_space(lo, hi, n);
}

ProblemParams parse_params(const json& j) {
    reject_unknown(j, "params", {"N", "s", "q", "alpha"});
    const int N = require<int>(j, "N", "params");
    const double s = require<double>(j, "s", "params");
    double alpha = 0.0;
    read(j, "alpha", "params", alpha);
    try {
        if (!j.contains("q") || j.at("q").is_null()) {
            return ProblemParams::critical(N, s, alpha);
        }
        return ProblemParams::make(N, s, require<double>(j, "q", "params"), alpha);
    } catch (const ConfigError& e) {
        throw ConfigError(fmt::format("params.{}", e.what()));
    }
}

}  // namespace

RunConfig parse_config(const json& j, const std::string& command) {
    if (std::find(kCommands.begin(), kCommands.end(), command) == kCommands.end()) {
        throw ConfigError(fmt::format("command: unknown '{}'", command));
    }
    reject_unknown(j, "config",
                   {"params", "grid", "seed", "constants", "minimize", "sweep", "shoot", "pohozaev", "evolve"});
    RunConfig c;
    c.command = command;
    if (!j.contains("params")) {
        throw ConfigError("params: required");
    }
    c.params = parse_params(j.at("params"));
    read(j, "seed", "config", c.seed);

    if (j.contains("grid")) {
        const auto& g = j.at("grid");
        reject_unknown(g, "grid", {"R_max", "M", "grading"});
        read(g, "R_max", "grid", c.grid.R_max);
        read(g, "M", "grid", c.grid.M);
        read(g, "grading", "grid", c.grid.grading);
    }
    // Grid validation reuses the factory's messages.
    make_grid(c.params.N, c.grid.R_max, c.grid.M, c.grid.grading);

    if (j.contains("constants")) {
        const auto& s = j.at("constants");
        reject_unknown(s, "constants", {"hardy_eps"});
        read(s, "hardy_eps", "constants", c.constants.hardy_eps);
    }
    for (double e : c.constants.hardy_eps) {
        positive(e, "constants.hardy_eps");
    }

    if (j.contains("minimize")) {
        const auto& s = j.at("minimize");
        reject_unknown(s, "minimize", {"weighted", "alphas", "grad_tol", "change_tol", "max_iter"});
        read(s, "weighted", "minimize", c.minimize.weighted);
        read(s, "alphas", "minimize", c.minimize.alphas);
        read(s, "grad_tol", "minimize", c.minimize.options.grad_tol);
        read(s, "change_tol", "minimize", c.minimize.options.change_tol);
        read(s, "max_iter", "minimize", c.minimize.options.max_iter);
    }
    positive(c.minimize.options.grad_tol, "minimize.grad_tol");
    positive(c.minimize.options.change_tol, "minimize.change_tol");
    if (c.minimize.options.max_iter < 1) {
        throw ConfigError("minimize.max_iter: must be >= 1");
    }

    if (j.contains("sweep")) {
        const auto& s = j.at("sweep");
        reject_unknown(s, "sweep", {"eps", "alphas", "variant"});
        if (s.contains("eps")) {
            c.sweep.eps = read_eps(s.at("eps"), "sweep.eps");
        }
        read(s, "alphas", "sweep", c.sweep.alphas);
        read(s, "variant", "sweep", c.sweep.variant);
    }
    if (c.sweep.eps.empty()) {
        c.sweep.eps = log_space(1e-4, 1e-1, 13);
    }
    for (double e : c.sweep.eps) {
        positive(e, "sweep.eps");
    }
    if (c.sweep.variant != "general" && c.sweep.variant != "dim3") {
        throw ConfigError(fmt::format("sweep.variant: expected general or dim3 (got {})", c.sweep.variant));
    }
    if (c.sweep.variant == "dim3" && c.params.N != 3) {
        throw ConfigError("sweep.variant: dim3 needs params.N = 3");
    }

    if (j.contains("shoot")) {
        const auto& s = j.at("shoot");
        reject_unknown(s, "shoot", {"d0_lo", "d0_hi", "samples", "max_nodes"});
        read(s, "d0_lo", "shoot", c.shoot.d0_lo);
        read(s, "d0_hi", "shoot", c.shoot.d0_hi);
        read(s, "samples", "shoot", c.shoot.samples);
        read(s, "max_nodes", "shoot", c.shoot.max_nodes);
    }
    positive(c.shoot.d0_lo, "shoot.d0_lo");
    if (!(c.shoot.d0_hi > c.shoot.d0_lo)) {
        throw ConfigError("shoot.d0_hi: must exceed shoot.d0_lo");
    }
    if (c.shoot.samples < 2 || c.shoot.max_nodes < 0) {
        throw ConfigError("shoot.samples: need >= 2 samples and max_nodes >= 0");
    }

    if (j.contains("pohozaev")) {
        const auto& s = j.at("pohozaev");
        reject_unknown(s, "pohozaev", {"field", "tolerance"});
        if (s.contains("field")) {
            c.pohozaev.field = require<std::string>(s, "field", "pohozaev");
        }
        read(s, "tolerance", "pohozaev", c.pohozaev.tolerance);
    }
    positive(c.pohozaev.tolerance, "pohozaev.tolerance");

    if (j.contains("evolve")) {
        const auto& s = j.at("evolve");
        reject_unknown(s, "evolve", {"t0", "t1", "dt0", "outputs", "snapshots", "M", "grading", "R_phys", "initial",
                                     "sigma", "reaction", "tolerance"});
        auto& e = c.evolve;
        read(s, "t0", "evolve", e.t0);
        read(s, "t1", "evolve", e.t1);
        read(s, "dt0", "evolve", e.dt0);
        read(s, "outputs", "evolve", e.outputs);
        read(s, "snapshots", "evolve", e.snapshots);
        read(s, "M", "evolve", e.M);
        read(s, "grading", "evolve", e.grading);
        if (s.contains("R_phys")) {
            e.R_phys = require<double>(s, "R_phys", "evolve");
        }
        read(s, "initial", "evolve", e.initial);
        read(s, "sigma", "evolve", e.sigma);
        read(s, "reaction", "evolve", e.reaction);
        read(s, "tolerance", "evolve", e.tolerance);
    }
    auto& e = c.evolve;
    positive(e.t0, "evolve.t0");
    if (!(e.t1 > e.t0)) {
        throw ConfigError("evolve.t1: must exceed evolve.t0");
    }
    positive(e.dt0, "evolve.dt0");
    positive(e.sigma, "evolve.sigma");
    positive(e.tolerance, "evolve.tolerance");
    if (e.outputs.empty()) {
        e.outputs = {e.t1};
    }
    if (!std::is_sorted(e.outputs.begin(), e.outputs.end()) ||
        std::adjacent_find(e.outputs.begin(), e.outputs.end()) != e.outputs.end() || e.outputs.front() <= e.t0 ||
        e.outputs.back() != e.t1) {
        throw ConfigError("evolve.outputs: must increase strictly within (t0, t1] and end at t1");
    }
    for (double t : e.snapshots) {
        if (std::find(e.outputs.begin(), e.outputs.end(), t) == e.outputs.end()) {
            throw ConfigError(fmt::format("evolve.snapshots: {} is not an output time", t));
        }
    }
    if (e.initial != "ground_state" && e.initial != "gaussian") {
        throw ConfigError(fmt::format("evolve.initial: expected ground_state or gaussian (got {})", e.initial));
    }
    if (e.R_phys) {
        positive(*e.R_phys, "evolve.R_phys");
    }
    const double R_phys = e.R_phys.value_or(physical_radius(c.grid.R_max, e.t1));
    make_physical_grid(c.params.N, R_phys, e.M, e.grading);

    // Command-specific preconditions, reported before any work starts.
    if (command == "minimize" && c.params.q != c.params.crit_exp) {
        throw ConfigError("params.q: minimize needs the critical exponent (omit q)");
    }
    if ((command == "ground-state" || command == "evolve") && c.params.is_critical()) {
        throw ConfigError("params.q: this command needs a subcritical exponent 2 < q < 2*(s)");
    }
    if (command == "ground-state" && c.params.alpha >= 0.5 * c.params.N) {
        throw ConfigError("params.alpha: must be below N/2");
    }
    if (command == "minimize" && c.minimize.weighted) {
        for (double a : c.minimize.alphas.empty() ? std::vector<double>{c.params.alpha} : c.minimize.alphas) {
            if (a >= 0.5 * c.params.N) {
                throw ConfigError(fmt::format("minimize.alphas: {} is not below N/2", a));
            }
        }
    }
    return c;
}

json to_json(const RunConfig& c) {
    const auto& p = c.params;
    const auto& e = c.evolve;
    json ev{{"t0", e.t0},           {"t1", e.t1},           {"dt0", e.dt0},       {"outputs", e.outputs},
            {"snapshots", e.snapshots}, {"M", e.M},         {"grading", e.grading}, {"initial", e.initial},
            {"sigma", e.sigma},     {"reaction", e.reaction}, {"tolerance", e.tolerance}};
    ev["R_phys"] = e.R_phys.value_or(physical_radius(c.grid.R_max, e.t1));
    return {
        {"command", c.command},
        {"params", {{"N", p.N}, {"s", p.s}, {"q", p.q}, {"alpha", p.alpha}, {"crit_exp", p.crit_exp},
                    {"alpha_ss", p.alpha_ss}}},
        {"grid", {{"R_max", c.grid.R_max}, {"M", c.grid.M}, {"grading", c.grid.grading}}},
        {"seed", c.seed},
        {"constants", {{"hardy_eps", c.constants.hardy_eps}}},
        {"minimize",
         {{"weighted", c.minimize.weighted}, {"alphas", c.minimize.alphas},
          {"grad_tol", c.minimize.options.grad_tol}, {"change_tol", c.minimize.options.change_tol},
          {"max_iter", c.minimize.options.max_iter}}},
        {"sweep", {{"eps", c.sweep.eps}, {"alphas", c.sweep.alphas}, {"variant", c.sweep.variant}}},
        {"shoot", {{"d0_lo", c.shoot.d0_lo}, {"d0_hi", c.shoot.d0_hi}, {"samples", c.shoot.samples},
                   {"max_nodes", c.shoot.max_nodes}}},
        {"pohozaev", {{"field", c.pohozaev.field ? json(*c.pohozaev.field) : json(nullptr)},
                      {"tolerance", c.pohozaev.tolerance}}},
        {"evolve", ev},
    };
}

}  // namespace hsheat
