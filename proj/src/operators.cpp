#include "hsheat/operators.hpp"

#include <cmath>

#include "hsheat/params.hpp"

namespace hsheat {

std::vector<double> fd_weights(double x0, std::span<const double> xs, int order) {
    // Fornberg (1988), "Generation of finite difference formulas on
    // arbitrarily spaced grids".
    const int n = static_cast<int>(xs.size());
    std::vector<std::vector<double>> c(n, std::vector<double>(order + 1, 0.0));
    double c1 = 1.0;
    double c4 = xs[0] - x0;
    c[0][0] = 1.0;
    for (int i = 1; i < n; ++i) {
        const int mn = std::min(i, order);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = xs[i] - x0;
        for (int j = 0; j < i; ++j) {
            const double c3 = xs[i] - xs[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k) {
                    c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (int k = mn; k >= 1; --k) {
                c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(n);
    for (int i = 0; i < n; ++i) {
        w[i] = c[i][order];
    }
    return w;
}

namespace {

double stencil(const RadialField& f, std::size_t first, std::size_t count, double x0, int order) {
    const auto r = f.grid().nodes();
    const auto w = fd_weights(x0, r.subspan(first, count), order);
    // Weights of a derivative stencil sum to zero; differencing against the
    // first value keeps constants exact despite O(1/h²) weights near r_1.
    double d = 0.0;
    for (std::size_t k = 1; k < count; ++k) {
        d += w[k] * (f[first + k] - f[first]);
    }
    return d;
}

void require_nodes(const RadialField& f) {
    if (f.size() < 4) {
        throw ConfigError("finite differences need at least 4 nodes");
    }
}

// -v'' - ((N-1)/r + drift·r/2) v' at an end node from one-sided stencils.
double expanded_operator(const RadialField& f, std::size_t i, bool drift) {
    const std::size_t m = f.size();
    const double r = f.grid().r(i);
    const std::size_t first = i == 0 ? 0 : m - 4;
    const double d1 = stencil(f, i == 0 ? 0 : m - 3, 3, r, 1);
    const double d2 = stencil(f, first, 4, r, 2);
    const double coeff = (f.grid().dim() - 1) / r + (drift ? 0.5 * r : 0.0);
    return -d2 - coeff * d1;
}

RadialField conservative_operator(const RadialField& f, bool weighted) {
    require_nodes(f);
    const RadialGrid& g = f.grid();
    const std::size_t m = f.size();
    std::vector<double> out(m);
    for (std::size_t i = 1; i + 1 < m; ++i) {
        const double ri = g.r(i);
        const double lw = std::log(g.w(i)) + (weighted ? 0.25 * ri * ri : 0.0);
        auto ratio = [&](std::size_t cell) {
            const double rm = g.cell_mid(cell);
            return std::exp(std::log(g.flux_coeff(cell)) + (weighted ? 0.25 * rm * rm : 0.0) - lw);
        };
        out[i] = ratio(i - 1) * (f[i] - f[i - 1]) - ratio(i) * (f[i + 1] - f[i]);
    }
    out[0] = expanded_operator(f, 0, weighted);
    out[m - 1] = expanded_operator(f, m - 1, weighted);
    return RadialField(f.grid_ptr(), std::move(out));
}

}  // namespace

RadialField differentiate(const RadialField& f) {
    require_nodes(f);
    const std::size_t m = f.size();
    const auto r = f.grid().nodes();
    std::vector<double> d(m);
    for (std::size_t i = 1; i + 1 < m; ++i) {
        d[i] = stencil(f, i - 1, 3, r[i], 1);
    }
    d[0] = stencil(f, 0, 3, r[0], 1);
    d[m - 1] = stencil(f, m - 3, 3, r[m - 1], 1);
    return RadialField(f.grid_ptr(), std::move(d));
}

RadialField apply_L(const RadialField& f) { return conservative_operator(f, true); }

RadialField apply_neg_laplacian(const RadialField& f) { return conservative_operator(f, false); }

SymTridiag stiffness_matrix(const RadialGrid& g, bool weighted, std::size_t n) {
    if (n == 0 || n > g.size()) {
        throw ConfigError("stiffness_matrix: bad number of unknowns");
    }
    SymTridiag a;
    a.diag.assign(n, 0.0);
    a.off.assign(n - 1, 0.0);
    // Cells touching at least one unknown node contribute.
    for (std::size_t c = 0; c + 1 < g.size() && c < n; ++c) {
        double k = g.flux_coeff(c);
        if (weighted) {
            const double rm = g.cell_mid(c);
            k *= std::exp(0.25 * rm * rm);
        }
        a.diag[c] += k;
        if (c + 1 < n) {
            a.diag[c + 1] += k;
            a.off[c] = -k;
        }
    }
    return a;
}

std::vector<double> mass_diagonal(const RadialGrid& g, bool weighted, std::size_t n) {
    std::vector<double> m(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double r = g.r(i);
        m[i] = g.w(i) * (weighted ? std::exp(0.25 * r * r) : 1.0);
    }
    return m;
}

}  // namespace hsheat
