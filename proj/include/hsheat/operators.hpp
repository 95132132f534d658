#pragma once

#include <array>
#include <span>
#include <vector>

#include "hsheat/field.hpp"
#include "hsheat/tridiag.hpp"

namespace hsheat {

/// Finite-difference weights (Fornberg) for derivative `order` at x0 from the
/// given stencil points.
std::vector<double> fd_weights(double x0, std::span<const double> xs, int order);

/// Nodal first derivative: centred three-point stencils on the nonuniform
/// mesh, one-sided three-point stencils at both ends. Second order.
RadialField differentiate(const RadialField& f);

/**
 * Lv = -v'' - ((N-1)/r + r/2) v' = -(1/K)(r^{N-1} K v')' / r^{N-1}.
 *
 * Interior nodes use the conservative flux stencil that matches
 * `gradient_form(., ., true)` and the K-weighted mass; the end nodes use
 * one-sided second-order stencils of the expanded form.
 */
RadialField apply_L(const RadialField& f);

/// -Δ for radial fields, same construction without the weight.
RadialField apply_neg_laplacian(const RadialField& f);

/**
 * Gradient form restricted to the first `n` nodes with the remaining nodes
 * held at zero (homogeneous Dirichlet data at the outer boundary).
 */
SymTridiag stiffness_matrix(const RadialGrid& g, bool weighted, std::size_t n);

/// Lumped mass w_i [K(r_i)] for the first n nodes.
std::vector<double> mass_diagonal(const RadialGrid& g, bool weighted, std::size_t n);

}  // namespace hsheat
