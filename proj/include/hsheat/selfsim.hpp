#pragma once

#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "hsheat/field.hpp"
#include "hsheat/params.hpp"

namespace hsheat {

/// Snapshot of u_t - Δu = |u|^{q-2}u |x|^{-s} in physical variables.
struct EvolutionState {
    double t = 0.0;
    RadialField field;
    double mass_q = 0.0;  ///< ∫|u|^q dx (exponent overridable, see EvolveOptions)
    double sup_u = 0.0;
    double dt_last = 0.0;
    int steps = 0;
    int rejected = 0;
    bool blew_up = false;
    double blowup_lo = 0.0;  ///< last accepted time before the blow-up step
    double blowup_hi = 0.0;
};

struct EvolveOptions {
    bool reaction = true;                  ///< false: pure heat flow
    std::optional<double> mass_exponent;   ///< observable exponent, defaults to q
    double max_change = 0.1;               ///< sup-relative change that rejects a step
    double dt_min = 1e-14;
    double blowup_factor = 1e6;
};

/**
 * Crank–Nicolson in the diffusion (unweighted finite-volume Laplacian, lumped
 * mass) with the reaction explicit, second-order Adams–Bashforth on variable
 * steps. Dirichlet zero at the outer node. A step that changes sup|u| by more
 * than max_change relative is redone at half the step; dt grows back toward
 * dt0 after quiet steps. Stops early on blow-up.
 */
EvolutionState evolve(const RadialField& u0, const ProblemParams& p, double t0, double t1, double dt0,
                      const EvolveOptions& opt = {});

/// States at t0 and every later time in `times` (increasing, > t0), one run.
std::vector<EvolutionState> evolve_series(const RadialField& u0, const ProblemParams& p, double t0,
                                          std::span<const double> times, double dt0, const EvolveOptions& opt = {});

/// Default physical radius 2·R·√t1 for a similarity grid of radius R.
double physical_radius(double R_similarity, double t1);

/// t^{-α} v(x/√t) on the physical grid; monotone cubic (pchip) in r, constant
/// below the first node of v, zero beyond its last.
RadialField self_similar_profile(const RadialField& v, const GridPtr& physical, double t, double alpha);

/// ‖u(t) - t^{-α}v(x/√t)‖ / ‖u(t)‖ in L²(dx) with α = alpha_ss; 0 when both vanish.
double selfsim_error(const RadialField& v, const EvolutionState& state, const ProblemParams& p);

struct DecayFit {
    double fitted_exponent = 0.0;
    double r2 = 0.0;
    int used = 0;
};

/// Least-squares slope of log(mass_q) against log t over states with positive
/// mass; needs five such states spanning a decade.
DecayFit decay_fit(std::span<const EvolutionState> states, const ProblemParams& p);

nlohmann::json to_json(const EvolutionState& s);
nlohmann::json to_json(const DecayFit& f);

}  // namespace hsheat
