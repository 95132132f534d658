#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "hsheat/field.hpp"
#include "hsheat/functionals.hpp"
#include "hsheat/params.hpp"

namespace hsheat {

struct EigenResult {
    double lambda1 = 0.0;
    RadialField eigenfield;
    int iterations = 0;
};

/**
 * Smallest eigenvalue of the K-weighted stiffness against the K-weighted mass
 * (Dirichlet at R_max) by inverse iteration. The eigenfield is positive at the
 * first node and has unit L²(K) norm.
 */
EigenResult first_eigenpair(const GridPtr& grid, int max_iter = 1000);

struct MinimizeOptions {
    double grad_tol = 1e-6;      ///< relative preconditioned gradient norm
    double change_tol = 1e-8;    ///< relative quotient change over `window` iterations
    int window = 10;
    int max_iter = 100000;
    bool polish = true;          ///< Newton polish when the rescaled residual misses polish_target
    double polish_target = 1e-6;
};

struct MinimizeReport {
    double S_value = 0.0;      ///< quotient at the final iterate
    RadialField minimizer;     ///< B = 1 (critical) or on the Nehari set (subcritical)
    RadialField rescaled;      ///< Nehari rescaling t*·minimizer, t* = (A/B)^{1/(q-2)}
    EnergyBreakdown rescaled_energy;
    int iterations = 0;
    double final_step = 0.0;
    double grad_norm = 0.0;
    bool converged = false;
    /// converged | max_iterations | line_search_stalled | concentrated (half of B
    /// would sit on fewer than 64 nodes; the last resolved iterate is kept)
    std::string status;
    double residual_after_rescale = 0.0;
    bool polished = false;
    std::vector<double> history;  ///< quotient per iteration
};

/// Critical case q = 2*(s): minimize Q_{K,α} (weighted) or Q_α on {B = 1}.
MinimizeReport minimize_quotient(const ProblemParams& p, bool weighted, const RadialField& init,
                                 const MinimizeOptions& opt = {});

/// Subcritical case: minimize A/B^{2/q}, then rescale onto the Nehari set.
MinimizeReport ground_state(const ProblemParams& p, const RadialField& init, const MinimizeOptions& opt = {});

/// K^{-1/2} φ V_ε with ε = 0.1 (critical) or e^{-r²/4} (subcritical).
RadialField default_initial_guess(const GridPtr& grid, const ProblemParams& p);

struct ShootingSolution {
    double d0 = 0.0;
    int node_count = 0;
    RadialField field;          ///< clipped: zero beyond clip_radius
    bool admissible = false;
    double terminal_value = 0.0;  ///< |v| at the clip radius
    double clip_radius = 0.0;
    bool blew_up = false;
    double reached_radius = 0.0;
    int raw_sign_changes = 0;   ///< before clipping
};

/**
 * Integrates v'' + ((N-1)/r + r/2) v' + αv + |v|^{q-2}v r^{-s} = 0 from
 * v = d0, v' = 0 at min(1e-6, r_1) across the nodes of `grid` (Dormand–Prince
 * 5(4)). Integration stops once |v| > 1e6|d0|. The junk tail excited by
 * round-off is clipped where log|v| + r²/8 is smallest.
 */
ShootingSolution shoot_radial(const ProblemParams& p, double d0, const GridPtr& grid);

/**
 * Scans d0 on a log grid, then bisects each change of the raw sign-change
 * count k → k+1 for k = 0..max_nodes; one solution per k found. d_lo is
 * lowered geometrically while the first sample already has sign changes.
 */
std::vector<ShootingSolution> shooting_ladder(const ProblemParams& p, const GridPtr& grid, int max_nodes,
                                              double d_lo = 1e-2, double d_hi = 1e3, int samples = 61);

/// Strict sign changes over the interior nodes (zeros skipped).
int sign_changes(const RadialField& f);

struct PohozaevReport {
    double id1_lhs = 0.0, id1_rhs = 0.0;
    double id3_lhs = 0.0, id3_rhs = 0.0;
    double rel_err1 = 0.0, rel_err3 = 0.0;
    bool hardy_bound_ok = false;
    bool degenerate = false;
};

/**
 * Unweighted integral identities for solutions on R^N:
 *   ∫|∇v|² + (N/4)∫v² = ∫|v|^q|y|^{-s} + α∫v²,
 *   ½∫(y·∇v)² = (α + N(N-2)/8)∫v² + ((N-s)/q - (N-2)/2)∫|v|^q|y|^{-s},
 * the last coefficient vanishing at q = 2*(s). hardy_bound_ok is
 * (N²/8)∫v² < (N(N-2)/8 + α)∫v².
 */
PohozaevReport pohozaev_check(const RadialField& v, const ProblemParams& p);

double relative_error(double lhs, double rhs);

nlohmann::json to_json(const MinimizeReport& r);
nlohmann::json to_json(const PohozaevReport& r);
nlohmann::json to_json(const ShootingSolution& s);
nlohmann::json to_json(const EigenResult& e);

}  // namespace hsheat
