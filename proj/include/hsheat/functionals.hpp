#pragma once

#include <optional>
#include <random>

#include <json.hpp>

#include "hsheat/field.hpp"
#include "hsheat/params.hpp"

namespace hsheat {

struct Norms {
    double grad_K = 0.0;  ///< (∫|v'|² K)^{1/2}
    double l2_K = 0.0;    ///< (∫v² K)^{1/2}
    double lqs_K = 0.0;   ///< (∫|v|^q |y|^{-s} K)^{1/q}
};

Norms norms(const RadialField& v, const ProblemParams& p);

/// A = ∫(|∇v|² - αv²)[K], B = ∫|v|^q |y|^{-s} [K], E = A/2 - B/q,
/// Q = A / B^{2/q} (empty when B = 0).
struct EnergyBreakdown {
    double A = 0.0;
    double B = 0.0;
    double E = 0.0;
    std::optional<double> Q;
};

EnergyBreakdown energy_breakdown(const RadialField& v, const ProblemParams& p, bool weighted = true);

/// Q_{K,α} (weighted) or Q_α; throws ConfigError when the denominator vanishes.
double rayleigh_quotient(const RadialField& v, const ProblemParams& p, bool weighted = true);

struct ResidualOptions {
    bool nonlinear = true;  ///< false drops the |v|^{q-2}v term (linear eigen-problem)
    bool weighted = true;   ///< false: -Δv = αv + ..., unweighted norms
};

struct Residual {
    RadialField field;
    double norm = 0.0;
};

/**
 * Strong residual Lv - αv - |v|^{q-2}v r^{-s} on interior nodes (zero at both
 * ends). `norm` is its L²(K) norm over the L²(K) norm of the right-hand side;
 * 0 when both vanish.
 */
Residual weak_residual(const RadialField& v, const ProblemParams& p, ResidualOptions opt = {});

/// ((2-s)/(2(N-s))) A (A/B)^{(N-2)/(2-s)}; empty when A ≤ 0 or B ≤ 0.
std::optional<double> mountain_pass_level(double A, double B, const ProblemParams& p);
std::optional<double> mountain_pass_level(const RadialField& v, const ProblemParams& p);

/// E_K(t v) from a precomputed breakdown of v.
double fiber_energy(const EnergyBreakdown& e, double t, double q);

/// Three positive Gaussian bumps (random heights, centres in [0, 2.5], widths
/// in [0.3, 1.5]) times (1 - r/R) e^{-r²/8}; vanishes at R_max.
RadialField random_admissible_field(const GridPtr& grid, std::mt19937_64& rng);

nlohmann::json to_json(const EnergyBreakdown& e, std::optional<double> residual_norm = std::nullopt);

}  // namespace hsheat
