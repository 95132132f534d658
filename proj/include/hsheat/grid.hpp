#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace hsheat {

/// Surface measure of the unit sphere S^{N-1}: 2π^{N/2}/Γ(N/2).
double sphere_area(int N);

/// Largest admissible truncation radius; e^{R²/4} stays far below DBL_MAX.
inline constexpr double kMaxRadius = 40.0;

/// Cap for grids in physical variables, which never carry the Gaussian weight.
inline constexpr double kMaxPhysicalRadius = 1e4;

/// Relative cell width h/r below which nodes use trapezoid weights.
inline constexpr double kTrapezoidSwitch = 5e-3;

/**
 * Graded radial mesh r_i = R_max (i/M)^grading, i = 1..M, on the shell
 * [r_1, R_max] of R^N.
 *
 * Each node owns the dual cell bounded by the neighbouring midpoints (the
 * first cell starts at r_1, the last ends at R_max). Away from the origin
 * `weights[i]` is the composite trapezoid weight times ω_{N-1} r_i^{N-1}.
 * On the innermost nodes, where h/r is not small, the lumped r^{N-1} factor
 * is O(1) wrong and the exact shell measure ω_{N-1}∫ r^{N-1} dr is used
 * instead; the finite-volume operators depend on this.
 */
class RadialGrid {
public:
    RadialGrid(int N, double R_max, int M, double grading, double radius_cap = kMaxRadius);

    [[nodiscard]] int dim() const { return N_; }
    [[nodiscard]] double R_max() const { return R_max_; }
    [[nodiscard]] int M() const { return M_; }
    [[nodiscard]] double grading() const { return grading_; }
    [[nodiscard]] double omega() const { return omega_; }
    [[nodiscard]] std::size_t size() const { return nodes_.size(); }

    [[nodiscard]] std::span<const double> nodes() const { return nodes_; }
    [[nodiscard]] std::span<const double> weights() const { return weights_; }
    [[nodiscard]] double r(std::size_t i) const { return nodes_[i]; }
    [[nodiscard]] double w(std::size_t i) const { return weights_[i]; }

    /// Cell i spans [r_i, r_{i+1}]; i = 0..size()-2.
    [[nodiscard]] double cell_width(std::size_t i) const { return nodes_[i + 1] - nodes_[i]; }
    [[nodiscard]] double cell_mid(std::size_t i) const { return 0.5 * (nodes_[i] + nodes_[i + 1]); }

    /// ω r_mid^{N-1} / h for cell i: the flux coefficient of the unweighted
    /// gradient form. Multiply by K(r_mid) for the weighted one.
    [[nodiscard]] double flux_coeff(std::size_t i) const { return flux_[i]; }

    bool operator==(const RadialGrid& o) const;

private:
    int N_;
    double R_max_;
    int M_;
    double grading_;
    double omega_;
    std::vector<double> nodes_;
    std::vector<double> weights_;
    std::vector<double> flux_;
};

using GridPtr = std::shared_ptr<const RadialGrid>;

/// Validating factory; throws ConfigError on N < 3, R_max ∉ (0, 40], M < 16,
/// grading < 1.
GridPtr make_grid(int N, double R_max, int M, double grading);

/// Same mesh for the parabolic problem in x; R_max up to kMaxPhysicalRadius.
/// K-weighted quadrature on such a grid may overflow.
GridPtr make_physical_grid(int N, double R_max, int M, double grading);

}  // namespace hsheat
