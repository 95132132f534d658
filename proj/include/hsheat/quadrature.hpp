#pragma once

#include <string_view>

#include "hsheat/field.hpp"

namespace hsheat {

/// Measures appearing in the weighted variational problem; K(y) = e^{|y|²/4}.
enum class WeightMode {
    K,           ///< K(y) dy
    K_over_rs,   ///< K(y) |y|^{-s} dy
    unweighted,  ///< dy
    inv_rs,      ///< |y|^{-s} dy
    r_squared,   ///< |y|² dy
    inv_r2_K,    ///< |y|^{-2} K(y) dy
};

std::string_view to_string(WeightMode m);

/// Natural log of the density of `mode` at radius r (relative to dy).
double log_density(WeightMode mode, double r, double s);

/**
 * Σ_i w_i f_i g_i ρ(r_i). Each term is assembled as
 * sign·exp(log w_i + log|f_i g_i| + log ρ(r_i)) so that K = e^{r²/4} is never
 * formed on its own. Throws NumericalError if the sum is not finite.
 */
double integrate(const RadialField& f, const RadialField& g, WeightMode mode, double s = 0.0);
double integrate(const RadialField& f, WeightMode mode, double s = 0.0);

/// Σ_i w_i |f_i|^p ρ(r_i), log-space as above.
double integrate_abs_pow(const RadialField& f, double p, WeightMode mode, double s = 0.0);

/**
 * Gradient pairing ∫ f' g' [K] dy on the staggered mesh: per cell,
 * ω r_mid^{N-1} [K(r_mid)] (Δf)(Δg)/h. This is the quadratic form whose
 * Euler–Lagrange operator is `apply_L`, so discrete critical points of
 * energies built from it satisfy the nodal equations exactly.
 */
double gradient_form(const RadialField& f, const RadialField& g, bool weighted);

}  // namespace hsheat
