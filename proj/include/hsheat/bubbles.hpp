#pragma once

#include <array>
#include <optional>
#include <vector>

#include "hsheat/field.hpp"
#include "hsheat/params.hpp"

namespace hsheat {

/// C¹ cutoff: 1 on [0,1], cubic smoothstep down to 0 on [1,2], 0 beyond.
double cutoff(double r);
double cutoff_derivative(double r);

/**
 * Hardy test function: 1 on [0,1], e^{1/4} r^{-γ} e^{-r²/4} beyond, with
 * γ = (N-2+2ε)/2. The e^{1/4} factor makes the two branches meet at r = 1.
 */
RadialField hardy_test_field(const GridPtr& grid, double eps);

/// ∫|∇V|²K / ∫V²|y|^{-2}K for the Hardy test function on `grid`.
double hardy_ratio(const GridPtr& grid, double eps);

/// U_ε = (ε(N-s)(N-2))^{(N-2)/(2(2-s))} (ε + r^{2-s})^{(2-N)/(2-s)}.
double bubble_value(int N, double s, double eps, double r);
double bubble_derivative(int N, double s, double eps, double r);
RadialField bubble_U(const GridPtr& grid, const ProblemParams& p, double eps);

enum class FamilyVariant {
    general,  ///< K^{-1/2} φ V_ε, V_ε = (ε + r^{2-s})^{-(N-2)/(2-s)}
    dim3,     ///< K^{-1/2} K^{-1/2} U_ε = e^{-r²/4} U_ε, N = 3 only
};

RadialField comparison_family(const GridPtr& grid, const ProblemParams& p, double eps, FamilyVariant v);

/**
 * Quotient data of a comparison-family member, evaluated by adaptive 1-D
 * quadrature of the closed form (no grid). All integrals are over R^N.
 */
struct FamilyQuotient {
    double grad_K = 0.0;   ///< ∫|∇u|² K
    double mass_K = 0.0;   ///< ∫u² K
    double pot_K = 0.0;    ///< ∫|u|^{2*}|y|^{-s} K
    double grad = 0.0;     ///< unweighted counterparts
    double mass = 0.0;
    double pot = 0.0;
    double Q_weighted = 0.0;
    double Q_unweighted = 0.0;
    double A = 0.0;  ///< grad_K - α mass_K
    double B = 0.0;  ///< pot_K
};

FamilyQuotient family_quotient(const ProblemParams& p, double eps, FamilyVariant v);

struct MomentIntegrals {
    std::array<double, 5> value{};  ///< A0..A4; NaN where invalid
    std::array<bool, 5> valid{};

    /// Throws ConfigError when A_i is not defined in this dimension.
    [[nodiscard]] double at(int i) const;
};

/// Dimension thresholds below which A_i diverges: {3, 3, 5, 7, 5}.
int moment_min_dimension(int i);

MomentIntegrals moment_integrals(const ProblemParams& p);

/**
 * ω ∫_0^∞ r^{N-1+a} (ε + r^β)^{-b} dr with β = 2-s. Composite Gauss–Legendre on
 * geometric panels up to where r^β = 4ε, binomial series for the tail.
 * Throws ConfigError if the integral diverges.
 */
double power_moment(int N, double s, double a, double b, double eps = 1.0);

/// S₀ = (∫|∇U_ε|²)^{(2-s)/(N-s)} by double-exponential quadrature of the bubble.
double s0_reference(const ProblemParams& p, double eps = 1.0);

/// Route through the moments: A0^{(2-N)/(N-s)} A1.
double s0_from_moments(const MomentIntegrals& m, const ProblemParams& p);

/// ω ∫_0^2 r^{N-1+a} φ² (ε + r^{2-s})^{-b} dr, the truncated pieces of T₁.
double cutoff_moment(int N, double s, double a, double b, double eps);

struct ExpansionRow {
    double eps = 0.0;
    FamilyQuotient q;
};

struct ExpansionFit {
    std::vector<ExpansionRow> rows;
    double x_power = 0.0;  ///< x = ε^{x_power}
    double a = 0.0;        ///< Q ≈ a + b x + c x²
    double b = 0.0;
    double c = 0.0;
};

/// Log-spaced sweep of Q_{K,α}(u_ε) and a least-squares quadratic in ε^{2/(2-s)}.
ExpansionFit expansion_sweep(const ProblemParams& p, const std::vector<double>& eps, FamilyVariant v);

std::vector<double> log_space(double lo, double hi, int n);

}  // namespace hsheat
