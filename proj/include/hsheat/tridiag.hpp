#pragma once

#include <span>
#include <vector>

namespace hsheat {

/// Symmetric tridiagonal matrix: diag[i], off[i] couples i and i+1.
struct SymTridiag {
    std::vector<double> diag;
    std::vector<double> off;

    [[nodiscard]] std::size_t size() const { return diag.size(); }
    [[nodiscard]] std::vector<double> apply(std::span<const double> x) const;
    [[nodiscard]] double quad_form(std::span<const double> x) const;
};

/**
 * LDLᵀ factorization of a symmetric tridiagonal matrix, no pivoting.
 * Intended for the SPD operators of this project (stiffness ± mass);
 * `positive_definite()` reports whether every pivot was > 0.
 */
class TridiagFactor {
public:
    explicit TridiagFactor(const SymTridiag& a);

    [[nodiscard]] bool positive_definite() const { return spd_; }
    [[nodiscard]] std::vector<double> solve(std::span<const double> rhs) const;

private:
    std::vector<double> d_;  // pivots
    std::vector<double> l_;  // sub-diagonal multipliers
    bool spd_ = true;
};

}  // namespace hsheat
