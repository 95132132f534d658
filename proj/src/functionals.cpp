#include "hsheat/functionals.hpp"

#include <array>
#include <cmath>
#include <limits>

#include "hsheat/operators.hpp"
#include "hsheat/quadrature.hpp"

namespace hsheat {

namespace {

WeightMode mass_mode(bool weighted) { return weighted ? WeightMode::K : WeightMode::unweighted; }
WeightMode potential_mode(bool weighted) { return weighted ? WeightMode::K_over_rs : WeightMode::inv_rs; }

}  // namespace

Norms norms(const RadialField& v, const ProblemParams& p) {
    Norms n;
    n.grad_K = std::sqrt(gradient_form(v, v, true));
    n.l2_K = std::sqrt(integrate(v, v, WeightMode::K));
    n.lqs_K = std::pow(integrate_abs_pow(v, p.q, WeightMode::K_over_rs, p.s), 1.0 / p.q);
    return n;
}

EnergyBreakdown energy_breakdown(const RadialField& v, const ProblemParams& p, bool weighted) {
    EnergyBreakdown e;
    e.A = gradient_form(v, v, weighted) - p.alpha * integrate(v, v, mass_mode(weighted));
    e.B = integrate_abs_pow(v, p.q, potential_mode(weighted), p.s);
    e.E = 0.5 * e.A - e.B / p.q;
    if (e.B > 0.0) {
        e.Q = e.A / std::pow(e.B, 2.0 / p.q);
    }
    return e;
}

double rayleigh_quotient(const RadialField& v, const ProblemParams& p, bool weighted) {
    const auto e = energy_breakdown(v, p, weighted);
    if (!e.Q) {
        throw ConfigError("rayleigh_quotient: degenerate input (zero denominator)");
    }
    return *e.Q;
}

Residual weak_residual(const RadialField& v, const ProblemParams& p, ResidualOptions opt) {
    const RadialField Lv = opt.weighted ? apply_L(v) : apply_neg_laplacian(v);
    const std::size_t m = v.size();
    std::vector<double> res(m, 0.0);
    std::vector<double> rhs(m, 0.0);
    for (std::size_t i = 1; i + 1 < m; ++i) {
        double f = p.alpha * v[i];
        if (opt.nonlinear && v[i] != 0.0) {
            f += std::copysign(std::pow(std::abs(v[i]), p.q - 1.0), v[i]) * std::pow(v.grid().r(i), -p.s);
        }
        rhs[i] = f;
        res[i] = Lv[i] - f;
    }
    RadialField rf(v.grid_ptr(), std::move(res));
    const RadialField ff(v.grid_ptr(), std::move(rhs));
    const WeightMode mode = mass_mode(opt.weighted);
    const double num = std::sqrt(integrate(rf, rf, mode));
    const double den = std::sqrt(integrate(ff, ff, mode));
    double norm = 0.0;
    if (den > 0.0) {
        norm = num / den;
    } else if (num > 0.0) {
        norm = std::numeric_limits<double>::infinity();
    }
    return {std::move(rf), norm};
}

std::optional<double> mountain_pass_level(double A, double B, const ProblemParams& p) {
    if (!(A > 0.0) || !(B > 0.0)) {
        return std::nullopt;
    }
    const double N = p.N;
    return (2.0 - p.s) / (2.0 * (N - p.s)) * A * std::pow(A / B, (N - 2.0) / (2.0 - p.s));
}

std::optional<double> mountain_pass_level(const RadialField& v, const ProblemParams& p) {
    if (!p.is_critical()) {
        throw ConfigError("mountain_pass_level: requires q = 2*(s)");
    }
    const auto e = energy_breakdown(v, p);
    return mountain_pass_level(e.A, e.B, p);
}

double fiber_energy(const EnergyBreakdown& e, double t, double q) {
    return 0.5 * t * t * e.A - std::pow(t, q) * e.B / q;
}

nlohmann::json to_json(const EnergyBreakdown& e, std::optional<double> residual_norm) {
    nlohmann::json j{{"A", e.A}, {"B", e.B}, {"E", e.E}};
    j["Q"] = e.Q ? nlohmann::json(*e.Q) : nlohmann::json(nullptr);
    j["residual_norm"] = residual_norm ? nlohmann::json(*residual_norm) : nlohmann::json(nullptr);
    return j;
}

RadialField random_admissible_field(const GridPtr& grid, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> amp(0.2, 1.0);
    std::uniform_real_distribution<double> ctr(0.0, 2.5);
    std::uniform_real_distribution<double> wid(0.3, 1.5);
    std::array<double, 3> a{}, c{}, w{};
    for (int k = 0; k < 3; ++k) {
        a[k] = amp(rng);
        c[k] = ctr(rng);
        w[k] = wid(rng);
    }
    const double R = grid->R_max();
    return RadialField::sample(grid, [&](double r) {
        double v = 0.0;
        for (int k = 0; k < 3; ++k) {
            v += a[k] * std::exp(-(r - c[k]) * (r - c[k]) / (w[k] * w[k]));
        }
        return v * (1.0 - r / R) * std::exp(-0.125 * r * r);
    });
}

}  // namespace hsheat
