#include "hsheat/solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <limits>

#include <boost/numeric/odeint.hpp>
#include <fmt/format.h>

#include "hsheat/bubbles.hpp"
#include "hsheat/operators.hpp"
#include "hsheat/quadrature.hpp"
#include "hsheat/tridiag.hpp"

namespace hsheat {

namespace {

using Vec = std::vector<double>;

double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += a[i] * b[i];
    }
    return s;
}

double weighted_dot(const Vec& a, const Vec& m, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += a[i] * m[i] * b[i];
    }
    return s;
}

constexpr std::size_t kMinResolvedNodes = 64;

// Unknowns: every node but the last (Dirichlet at R_max).
std::size_t unknowns(const RadialGrid& g) { return g.size() - 1; }

RadialField embed(const GridPtr& g, const Vec& x) {
    Vec v(g->size(), 0.0);
    std::copy(x.begin(), x.end(), v.begin());
    return RadialField(g, std::move(v));
}

// Discrete quotient data on {x ∈ R^n}: A = xᵀPx, B = Σ ms_i |x_i|^q.
struct Discrete {
    SymTridiag P0;  // S - αM
    Vec mass;
    Vec ms;         // w_i [K_i] r_i^{-s}
    double q;

    double A(const Vec& x) const { return P0.quad_form(x); }
    double B(const Vec& x) const {
        double b = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            b += ms[i] * std::pow(std::abs(x[i]), q);
        }
        return b;
    }
    // First index holding half of B; small values mean the profile lives on a
    // handful of cells, where the lumped quadrature undercuts the Sobolev bound.
    std::size_t half_mass_index(const Vec& x) const {
        const double half = 0.5 * B(x);
        double acc = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            acc += ms[i] * std::pow(std::abs(x[i]), q);
            if (acc >= half) {
                return i;
            }
        }
        return x.size();
    }
    Vec gradB(const Vec& x) const {
        Vec g(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
            g[i] = q * ms[i] * std::pow(std::abs(x[i]), q - 2.0) * x[i];
        }
        return g;
    }
};

Discrete discretize(const RadialGrid& g, const ProblemParams& p, bool weighted) {
    const std::size_t n = unknowns(g);
    Discrete d{stiffness_matrix(g, weighted, n), mass_diagonal(g, weighted, n), Vec(n), p.q};
    for (std::size_t i = 0; i < n; ++i) {
        d.P0.diag[i] -= p.alpha * d.mass[i];
        const WeightMode mode = weighted ? WeightMode::K_over_rs : WeightMode::inv_rs;
        d.ms[i] = std::exp(std::log(g.w(i)) + log_density(mode, g.r(i), p.s));
    }
    return d;
}

void normalize_B(const Discrete& d, Vec& x) {
    const double c = std::pow(d.B(x), -1.0 / d.q);
    for (double& v : x) {
        v *= c;
    }
}

// Newton on (S - αM)v = ms|v|^{q-2}v. Returns true when it lowered the residual.
bool newton_polish(const Discrete& d, const GridPtr& g, const ProblemParams& p, bool weighted, Vec& v,
                   double& residual) {
    const ResidualOptions ropt{true, weighted};
    bool improved = false;
    for (int it = 0; it < 12 && residual > 1e-13; ++it) {
        Vec F = d.P0.apply(v);
        SymTridiag J = d.P0;
        for (std::size_t i = 0; i < v.size(); ++i) {
            const double a = std::pow(std::abs(v[i]), d.q - 2.0);
            F[i] -= d.ms[i] * a * v[i];
            J.diag[i] -= (d.q - 1.0) * d.ms[i] * a;
        }
        const Vec delta = TridiagFactor(J).solve(F);
        Vec trial = v;
        for (std::size_t i = 0; i < v.size(); ++i) {
            trial[i] -= delta[i];
        }
        bool finite = std::all_of(trial.begin(), trial.end(), [](double t) { return std::isfinite(t); });
        if (!finite) {
            break;
        }
        const double r = weak_residual(embed(g, trial), p, ropt).norm;
        if (!(r < residual)) {
            break;
        }
        v = std::move(trial);
        residual = r;
        improved = true;
    }
    return improved;
}

MinimizeReport descend(const ProblemParams& p, bool weighted, const RadialField& init, const MinimizeOptions& opt,
                       bool nehari_minimizer) {
    const GridPtr& gp = init.grid_ptr();
    const RadialGrid& g = *gp;
    const Discrete d = discretize(g, p, weighted);
    const std::size_t n = unknowns(g);

    TridiagFactor precond(d.P0);
    if (!precond.positive_definite()) {
        // α above the discrete first eigenvalue: fall back to S + M.
        SymTridiag alt = d.P0;
        for (std::size_t i = 0; i < n; ++i) {
            alt.diag[i] += (p.alpha + 1.0) * d.mass[i];
        }
        precond = TridiagFactor(alt);
    }

    Vec x(init.values().begin(), init.values().begin() + static_cast<std::ptrdiff_t>(n));
    if (d.B(x) <= 0.0 || !std::isfinite(d.B(x))) {
        throw ConfigError("initial field must be nonzero inside the domain");
    }
    normalize_B(d, x);

    MinimizeReport rep;
    rep.status = "max_iterations";
    double Q = d.A(x);
    std::deque<double> recent{Q};
    double tau = 0.5;
    for (int it = 1; it <= opt.max_iter; ++it) {
        // B(x) = 1: ∇Q = ∇A - (2/q) A ∇B.
        Vec grad = d.P0.apply(x);
        const Vec gb = d.gradB(x);
        for (std::size_t i = 0; i < n; ++i) {
            grad[i] = 2.0 * grad[i] - (2.0 / d.q) * Q * gb[i];
        }
        const Vec dir = precond.solve(grad);
        const double gPg = std::max(dot(grad, dir), 0.0);
        // ‖∇Q‖_{P⁻¹}‖x‖_P / Q with ‖x‖_P² = A = Q on {B = 1}.
        rep.grad_norm = std::sqrt(gPg * std::max(Q, 0.0)) / std::abs(Q);
        rep.iterations = it - 1;

        const bool flat = recent.size() > static_cast<std::size_t>(opt.window) &&
                          std::abs(recent.front() - Q) <= opt.change_tol * std::abs(Q);
        if (rep.grad_norm <= opt.grad_tol && flat) {
            rep.converged = true;
            rep.status = "converged";
            break;
        }

        tau = 0.5;
        bool accepted = false;
        Vec trial(n);
        double Qt = Q;
        while (tau > 1e-16) {
            for (std::size_t i = 0; i < n; ++i) {
                trial[i] = x[i] - tau * dir[i];
            }
            const double b = d.B(trial);
            if (b > 0.0 && std::isfinite(b)) {
                normalize_B(d, trial);
                Qt = d.A(trial);
                if (Qt <= Q - 1e-4 * tau * gPg + 1e-14 * std::abs(Q)) {
                    accepted = true;
                    break;
                }
            }
            tau *= 0.5;
        }
        if (!accepted) {
            rep.status = "line_search_stalled";
            break;
        }
        if (d.half_mass_index(trial) < kMinResolvedNodes) {
            rep.status = "concentrated";
            break;
        }
        x.swap(trial);
        Q = Qt;
        rep.final_step = tau;
        rep.history.push_back(Q);
        recent.push_back(Q);
        if (recent.size() > static_cast<std::size_t>(opt.window) + 1) {
            recent.pop_front();
        }
        rep.iterations = it;
    }

    if (x[0] < 0.0) {
        for (double& v : x) {
            v = -v;
        }
    }
    rep.S_value = Q;
    // Nehari rescaling: B = 1 here, so t* = A^{1/(q-2)}.
    const double tstar = Q > 0.0 ? std::pow(Q, 1.0 / (d.q - 2.0)) : 1.0;
    Vec v = x;
    for (double& t : v) {
        t *= tstar;
    }
    const ResidualOptions ropt{true, weighted};
    double res = weak_residual(embed(gp, v), p, ropt).norm;
    if (opt.polish && Q > 0.0 && res > opt.polish_target) {
        rep.polished = newton_polish(d, gp, p, weighted, v, res);
        if (rep.polished) {
            rep.S_value = d.A(v) / std::pow(d.B(v), 2.0 / d.q);
        }
    }
    rep.residual_after_rescale = res;
    rep.rescaled = embed(gp, v);
    rep.rescaled_energy = energy_breakdown(rep.rescaled, p, weighted);
    rep.minimizer = nehari_minimizer ? rep.rescaled : embed(gp, x);
    return rep;
}

void require_alpha_below_spectrum(const ProblemParams& p) {
    if (p.alpha >= 0.5 * p.N) {
        throw ConfigError(fmt::format("alpha = {} must be below the first eigenvalue N/2 = {}", p.alpha, 0.5 * p.N));
    }
}

}  // namespace

EigenResult first_eigenpair(const GridPtr& grid, int max_iter) {
    const RadialGrid& g = *grid;
    const std::size_t n = unknowns(g);
    const SymTridiag S = stiffness_matrix(g, true, n);
    const Vec m = mass_diagonal(g, true, n);
    const TridiagFactor f(S);
    if (!f.positive_definite()) {
        throw NumericalError("stiffness matrix is not positive definite");
    }
    Vec x(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double r = g.r(i);
        x[i] = std::exp(-r * r / 8.0) / (1.0 + r * r);
    }
    double lambda = S.quad_form(x) / weighted_dot(x, m, x);
    EigenResult res;
    for (int it = 1; it <= max_iter; ++it) {
        Vec rhs(n);
        for (std::size_t i = 0; i < n; ++i) {
            rhs[i] = m[i] * x[i];
        }
        x = f.solve(rhs);
        const double nrm = std::sqrt(weighted_dot(x, m, x));
        for (double& v : x) {
            v /= nrm;
        }
        const double next = S.quad_form(x);
        res.iterations = it;
        const bool done = std::abs(next - lambda) <= 1e-14 * std::abs(next);
        lambda = next;
        if (done) {
            if (x[0] < 0.0) {
                for (double& v : x) {
                    v = -v;
                }
            }
            res.lambda1 = lambda;
            res.eigenfield = embed(grid, x);
            return res;
        }
    }
    throw NumericalError(fmt::format("inverse iteration did not converge in {} iterations", max_iter));
}

RadialField default_initial_guess(const GridPtr& grid, const ProblemParams& p) {
    if (p.is_critical()) {
        return comparison_family(grid, p, 0.1, FamilyVariant::general);
    }
    return RadialField::sample(grid, [](double r) { return std::exp(-0.25 * r * r); });
}

MinimizeReport minimize_quotient(const ProblemParams& p, bool weighted, const RadialField& init,
                                 const MinimizeOptions& opt) {
    if (!p.is_critical()) {
        throw ConfigError("minimize_quotient needs the critical exponent q = 2*(s)");
    }
    if (weighted) {
        require_alpha_below_spectrum(p);
    }
    return descend(p, weighted, init, opt, false);
}

MinimizeReport ground_state(const ProblemParams& p, const RadialField& init, const MinimizeOptions& opt) {
    if (!(p.q > 2.0 && p.q < p.crit_exp)) {
        throw ConfigError(fmt::format("ground_state needs 2 < q < {}, got q = {}", p.crit_exp, p.q));
    }
    require_alpha_below_spectrum(p);
    return descend(p, true, init, opt, true);
}

int sign_changes(const RadialField& f) {
    int count = 0;
    double last = 0.0;
    for (std::size_t i = 0; i + 1 < f.size(); ++i) {
        const double v = f[i];
        if (v == 0.0) {
            continue;
        }
        if (last != 0.0 && (v > 0.0) != (last > 0.0)) {
            ++count;
        }
        last = v;
    }
    return count;
}

ShootingSolution shoot_radial(const ProblemParams& p, double d0, const GridPtr& grid) {
    namespace ode = boost::numeric::odeint;
    using State = std::array<double, 2>;
    if (d0 == 0.0 || !std::isfinite(d0)) {
        throw ConfigError("shooting needs a finite d0 != 0");
    }
    const double height = std::abs(d0);
    const RadialGrid& g = *grid;
    const double N = g.dim();
    const auto rhs = [&](const State& y, State& dy, double r) {
        dy[0] = y[1];
        dy[1] = -((N - 1.0) / r + 0.5 * r) * y[1] - p.alpha * y[0] -
                std::pow(std::abs(y[0]), p.q - 2.0) * y[0] * std::pow(r, -p.s);
    };
    auto stepper = ode::make_controlled(1e-12 * height, 1e-12, ode::runge_kutta_dopri5<State>());

    ShootingSolution sol;
    sol.d0 = d0;
    Vec v(g.size(), 0.0);
    State y{d0, 0.0};
    double r = std::min(1e-6, g.r(0));
    std::size_t reached = 0;
    const double guard = 1e6 * height;
    try {
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double target = g.r(i);
            if (target > r) {
                ode::integrate_adaptive(stepper, rhs, y, r, target, 0.1 * (target - r));
                r = target;
            }
            if (!std::isfinite(y[0]) || std::abs(y[0]) > guard) {
                sol.blew_up = true;
                break;
            }
            v[i] = y[0];
            reached = i + 1;
        }
    } catch (const ode::step_adjustment_error&) {
        throw NumericalError(fmt::format("shooting step size underflow near r = {}", r));
    }
    sol.reached_radius = reached > 0 ? g.r(reached - 1) : 0.0;
    sol.raw_sign_changes = sign_changes(RadialField(grid, v));

    // Walk back while log|v| + r²/8 keeps decreasing.
    std::size_t clip = reached == 0 ? 0 : reached - 1;
    const auto score = [&](std::size_t i) {
        return v[i] == 0.0 ? -std::numeric_limits<double>::infinity()
                           : std::log(std::abs(v[i])) + g.r(i) * g.r(i) / 8.0;
    };
    while (clip > 0 && score(clip - 1) < score(clip)) {
        --clip;
    }
    for (std::size_t i = clip + 1; i < v.size(); ++i) {
        v[i] = 0.0;
    }
    sol.clip_radius = g.r(clip);
    sol.terminal_value = std::abs(v[clip]);
    sol.admissible = !sol.blew_up && sol.terminal_value <= 1e-8 * height;
    sol.field = RadialField(grid, std::move(v));
    sol.node_count = sign_changes(sol.field);
    return sol;
}

std::vector<ShootingSolution> shooting_ladder(const ProblemParams& p, const GridPtr& grid, int max_nodes,
                                              double d_lo, double d_hi, int samples) {
    if (!(d_lo > 0.0 && d_hi > d_lo) || samples < 2 || max_nodes < 0) {
        throw ConfigError("shooting_ladder: need 0 < d_lo < d_hi, samples >= 2, max_nodes >= 0");
    }
    Vec ds = log_space(d_lo, d_hi, samples);
    std::vector<int> counts;
    counts.reserve(ds.size());
    for (double d : ds) {
        counts.push_back(shoot_radial(p, d, grid).raw_sign_changes);
    }
    // The smallest height must sit below the first transition; expand geometrically.
    for (int expand = 0; expand < 20 && counts.front() > 0; ++expand) {
        ds.insert(ds.begin(), ds.front() / 10.0);
        counts.insert(counts.begin(), shoot_radial(p, ds.front(), grid).raw_sign_changes);
    }
    std::vector<ShootingSolution> out;
    for (int k = 0; k <= max_nodes; ++k) {
        std::size_t j = 0;
        while (j < ds.size() && counts[j] <= k) {
            ++j;
        }
        if (j == 0 || j == ds.size()) {
            continue;
        }
        double lo = ds[j - 1];
        double hi = ds[j];
        for (int it = 0; it < 200 && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * hi; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (shoot_radial(p, mid, grid).raw_sign_changes > k) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        ShootingSolution s = shoot_radial(p, lo, grid);
        if (s.node_count == k) {
            out.push_back(std::move(s));
        }
    }
    return out;
}

double relative_error(double lhs, double rhs) {
    const double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-300});
    return std::abs(lhs - rhs) / scale;
}

PohozaevReport pohozaev_check(const RadialField& v, const ProblemParams& p) {
    const RadialField dv = differentiate(v);
    const double G = integrate(dv, dv, WeightMode::unweighted);
    const double T = integrate(dv, dv, WeightMode::r_squared);
    const double L2 = integrate(v, v, WeightMode::unweighted);
    const double B0 = integrate_abs_pow(v, p.q, WeightMode::inv_rs, p.s);
    const double N = p.N;
    PohozaevReport rep;
    rep.id1_lhs = G + 0.25 * N * L2;
    rep.id1_rhs = B0 + p.alpha * L2;
    rep.id3_lhs = 0.5 * T;
    rep.id3_rhs = (p.alpha + N * (N - 2.0) / 8.0) * L2 + ((N - p.s) / p.q - 0.5 * (N - 2.0)) * B0;
    rep.degenerate = G == 0.0 && L2 == 0.0 && B0 == 0.0;
    if (!rep.degenerate) {
        rep.rel_err1 = relative_error(rep.id1_lhs, rep.id1_rhs);
        rep.rel_err3 = relative_error(rep.id3_lhs, rep.id3_rhs);
    }
    rep.hardy_bound_ok = N * N / 8.0 * L2 < (N * (N - 2.0) / 8.0 + p.alpha) * L2;
    return rep;
}

nlohmann::json to_json(const MinimizeReport& r) {
    return {{"S_value", r.S_value},
            {"iterations", r.iterations},
            {"final_step", r.final_step},
            {"grad_norm", r.grad_norm},
            {"converged", r.converged},
            {"status", r.status},
            {"residual_after_rescale", r.residual_after_rescale},
            {"polished", r.polished},
            {"energy", to_json(r.rescaled_energy, r.residual_after_rescale)}};
}

nlohmann::json to_json(const PohozaevReport& r) {
    return {{"id1_lhs", r.id1_lhs}, {"id1_rhs", r.id1_rhs},   {"id3_lhs", r.id3_lhs},
            {"id3_rhs", r.id3_rhs}, {"rel_err1", r.rel_err1}, {"rel_err3", r.rel_err3},
            {"hardy_bound_ok", r.hardy_bound_ok}, {"degenerate", r.degenerate}};
}

nlohmann::json to_json(const ShootingSolution& s) {
    return {{"d0", s.d0},
            {"node_count", s.node_count},
            {"admissible", s.admissible},
            {"terminal_value", s.terminal_value},
            {"clip_radius", s.clip_radius},
            {"blew_up", s.blew_up},
            {"reached_radius", s.reached_radius},
            {"raw_sign_changes", s.raw_sign_changes}};
}

nlohmann::json to_json(const EigenResult& e) {
    return {{"lambda1", e.lambda1}, {"iterations", e.iterations}};
}

}  // namespace hsheat
