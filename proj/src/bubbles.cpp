#include "hsheat/bubbles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <fmt/format.h>

#include "hsheat/grid.hpp"
#include "hsheat/quadrature.hpp"

namespace hsheat {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// log(ε + r^β) without overflow for large r.
double log_eps_plus(double eps, double r, double beta) {
    const double lb = beta * std::log(r);
    return lb > std::log(eps) ? lb + std::log1p(eps * std::exp(-lb)) : std::log(eps) + std::log1p(std::exp(lb) / eps);
}

// Σ over consecutive breakpoints of fixed 30-point Gauss–Legendre. Panels are
// geometric (ratio 2) so each integrand is analytic on a neighbourhood of its
// panel and the rule converges geometrically.
template <class F>
double panel_integral(F&& f, std::vector<double> breaks) {
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    double sum = 0.0;
    for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
        sum += boost::math::quadrature::gauss<double, 30>::integrate(f, breaks[k], breaks[k + 1]);
    }
    if (!std::isfinite(sum)) {
        throw NumericalError("panel quadrature: non-finite result");
    }
    return sum;
}

// 0, then scale·2^k for k = -48.. while below `hi`, then `extra` and hi.
std::vector<double> geometric_breaks(double scale, double hi, std::initializer_list<double> extra = {}) {
    std::vector<double> b{0.0};
    for (double x = scale * std::ldexp(1.0, -48); x < hi; x *= 2.0) {
        b.push_back(x);
    }
    for (double e : extra) {
        if (e < hi) {
            b.push_back(e);
        }
    }
    b.push_back(hi);
    return b;
}

}  // namespace

double cutoff(double r) {
    if (r <= 1.0) {
        return 1.0;
    }
    if (r >= 2.0) {
        return 0.0;
    }
    const double t = r - 1.0;
    return 1.0 - t * t * (3.0 - 2.0 * t);
}

double cutoff_derivative(double r) {
    if (r <= 1.0 || r >= 2.0) {
        return 0.0;
    }
    const double t = r - 1.0;
    return -6.0 * t * (1.0 - t);
}

RadialField hardy_test_field(const GridPtr& grid, double eps) {
    if (!(eps > 0.0)) {
        throw ConfigError("hardy_test_field: eps must be > 0");
    }
    const double gamma = (grid->dim() - 2.0 + 2.0 * eps) / 2.0;
    return RadialField::sample(grid, [gamma](double r) {
        return r <= 1.0 ? 1.0 : std::exp(0.25 - gamma * std::log(r) - 0.25 * r * r);
    });
}

double hardy_ratio(const GridPtr& grid, double eps) {
    const auto V = hardy_test_field(grid, eps);
    return gradient_form(V, V, true) / integrate(V, V, WeightMode::inv_r2_K);
}

double bubble_value(int N, double s, double eps, double r) {
    const double beta = 2.0 - s;
    const double lc = (N - 2.0) / (2.0 * beta) * std::log(eps * (N - s) * (N - 2.0));
    return std::exp(lc + (2.0 - N) / beta * log_eps_plus(eps, r, beta));
}

double bubble_derivative(int N, double s, double eps, double r) {
    const double beta = 2.0 - s;
    const double lc = (N - 2.0) / (2.0 * beta) * std::log(eps * (N - s) * (N - 2.0));
    return (2.0 - N) * std::exp(lc + (1.0 - s) * std::log(r) + ((2.0 - N) / beta - 1.0) * log_eps_plus(eps, r, beta));
}

RadialField bubble_U(const GridPtr& grid, const ProblemParams& p, double eps) {
    if (!(eps > 0.0)) {
        throw ConfigError("bubble_U: eps must be > 0");
    }
    return RadialField::sample(grid, [&](double r) { return bubble_value(p.N, p.s, eps, r); });
}

namespace {

struct FamilyShape {
    int N;
    double s;
    double eps;
    FamilyVariant variant;

    // g = K^{1/2} u and g'.
    [[nodiscard]] std::pair<double, double> g(double r) const {
        if (variant == FamilyVariant::dim3) {
            const double e = std::exp(-0.125 * r * r);
            const double U = bubble_value(N, s, eps, r);
            return {e * U, e * (bubble_derivative(N, s, eps, r) - 0.25 * r * U)};
        }
        const double beta = 2.0 - s;
        const double lv = -(N - 2.0) / beta * log_eps_plus(eps, r, beta);
        const double V = std::exp(lv);
        const double dV = -(N - 2.0) * std::exp((1.0 - s) * std::log(r) + lv - log_eps_plus(eps, r, beta));
        return {cutoff(r) * V, cutoff_derivative(r) * V + cutoff(r) * dV};
    }
};

}  // namespace

RadialField comparison_family(const GridPtr& grid, const ProblemParams& p, double eps, FamilyVariant v) {
    if (!(eps > 0.0)) {
        throw ConfigError("comparison_family: eps must be > 0");
    }
    if (v == FamilyVariant::dim3 && p.N != 3) {
        throw ConfigError("comparison_family: the dim3 variant requires N = 3");
    }
    const FamilyShape shape{p.N, p.s, eps, v};
    return RadialField::sample(grid, [&](double r) { return std::exp(-0.125 * r * r) * shape.g(r).first; });
}

FamilyQuotient family_quotient(const ProblemParams& p, double eps, FamilyVariant v) {
    if (!(eps > 0.0)) {
        throw ConfigError("family_quotient: eps must be > 0");
    }
    if (v == FamilyVariant::dim3 && p.N != 3) {
        throw ConfigError("family_quotient: the dim3 variant requires N = 3");
    }
    const FamilyShape shape{p.N, p.s, eps, v};
    const double omega = sphere_area(p.N);
    const double lambda = std::pow(eps, 1.0 / (2.0 - p.s));
    const double hi = v == FamilyVariant::general ? 2.0 : kMaxRadius;
    const auto breaks = geometric_breaks(lambda, hi, {1.0, 2.0});
    const double q = p.q;
    const int N = p.N;

    auto radial = [&](auto&& density) {
        return omega * panel_integral(
                           [&](double r) {
                               const auto [g, dg] = shape.g(r);
                               return density(r, g, dg) * std::pow(r, N - 1);
                           },
                           breaks);
    };

    FamilyQuotient out;
    out.grad_K = radial([](double r, double g, double dg) { return (dg - 0.25 * r * g) * (dg - 0.25 * r * g); });
    out.mass_K = radial([](double, double g, double) { return g * g; });
    out.pot_K = radial([&](double r, double g, double) {
        return std::exp(q * std::log(std::abs(g)) + (1.0 - 0.5 * q) * 0.25 * r * r - p.s * std::log(r));
    });
    out.grad = radial([](double r, double g, double dg) {
        return std::exp(-0.25 * r * r) * (dg - 0.25 * r * g) * (dg - 0.25 * r * g);
    });
    out.mass = radial([](double r, double g, double) { return std::exp(-0.25 * r * r) * g * g; });
    out.pot = radial([&](double r, double g, double) {
        return std::exp(q * std::log(std::abs(g)) - 0.125 * q * r * r - p.s * std::log(r));
    });
    out.A = out.grad_K - p.alpha * out.mass_K;
    out.B = out.pot_K;
    out.Q_weighted = out.A / std::pow(out.pot_K, 2.0 / q);
    out.Q_unweighted = (out.grad - p.alpha * out.mass) / std::pow(out.pot, 2.0 / q);
    return out;
}

double power_moment(int N, double s, double a, double b, double eps) {
    const double beta = 2.0 - s;
    const double c = N + a;
    if (!(c > 0.0) || !(beta * b > c)) {
        throw ConfigError(fmt::format("power_moment: divergent integral (N={}, a={}, b={})", N, a, b));
    }
    const double RA = std::pow(4.0 * eps, 1.0 / beta);
    const double lambda = std::pow(eps, 1.0 / beta);
    const double head = panel_integral(
        [&](double r) { return std::exp((c - 1.0) * std::log(r) - b * log_eps_plus(eps, r, beta)); },
        geometric_breaks(lambda, RA));

    // (ε + r^β)^{-b} = r^{-βb} Σ_k C(-b,k) (ε r^{-β})^k, and ε R_A^{-β} = 1/4.
    const double lead = std::pow(RA, c - beta * b);
    double coef = 1.0;
    double tail = 0.0;
    for (int k = 0; k < 400; ++k) {
        const double term = coef * std::ldexp(1.0, -2 * k) * lead / (beta * (b + k) - c);
        tail += term;
        if (std::abs(term) < 1e-18 * std::abs(head + tail)) {
            break;
        }
        coef *= -(b + k) / (k + 1.0);
    }
    return sphere_area(N) * (head + tail);
}

int moment_min_dimension(int i) {
    static constexpr std::array<int, 5> kMin{3, 3, 5, 7, 5};
    return kMin.at(i);
}

double MomentIntegrals::at(int i) const {
    if (i < 0 || i > 4) {
        throw ConfigError(fmt::format("moment index {} out of range", i));
    }
    if (!valid[i]) {
        throw ConfigError(fmt::format("A{} is only defined for N >= {}", i, moment_min_dimension(i)));
    }
    return value[i];
}

MomentIntegrals moment_integrals(const ProblemParams& p) {
    const int N = p.N;
    const double s = p.s;
    const double beta = 2.0 - s;
    struct Spec {
        double coeff, a, b;
    };
    const std::array<Spec, 5> specs{{
        {1.0, -s, 2.0 * (N - s) / beta},
        {(N - 2.0) * (N - 2.0), 2.0 - 2.0 * s, 2.0 * (N - s) / beta},
        {(N - 2.0) / 2.0, 2.0 - s, (2.0 * N - s - 2.0) / beta},
        {1.0 / 16.0, 2.0, 2.0 * (N - 2.0) / beta},
        {1.0, 0.0, (2.0 * N - 4.0) / beta},
    }};
    MomentIntegrals m;
    for (int i = 0; i < 5; ++i) {
        m.valid[i] = N >= moment_min_dimension(i);
        m.value[i] = m.valid[i] ? specs[i].coeff * power_moment(N, s, specs[i].a, specs[i].b) : kNaN;
    }
    return m;
}

double s0_reference(const ProblemParams& p, double eps) {
    if (!(eps > 0.0)) {
        throw ConfigError("s0_reference: eps must be > 0");
    }
    const double omega = sphere_area(p.N);
    const double lambda = std::pow(eps, 1.0 / (2.0 - p.s));
    const double beta = 2.0 - p.s;
    const double lc = (p.N - 2.0) / beta * std::log(eps * (p.N - p.s) * (p.N - 2.0)) + 2.0 * std::log(p.N - 2.0);
    // |U'|² r^{N-1}, assembled in log space so that huge r underflows cleanly.
    auto f = [&](double r) {
        if (!(r > 0.0) || !std::isfinite(r)) {
            return 0.0;
        }
        const double lr = std::log(r);
        return std::exp(lc + (2.0 - 2.0 * p.s + p.N - 1.0) * lr +
                        2.0 * ((2.0 - p.N) / beta - 1.0) * log_eps_plus(eps, r, beta));
    };
    boost::math::quadrature::tanh_sinh<double> inner;
    boost::math::quadrature::exp_sinh<double> outer;
    const double grad = omega * (inner.integrate(f, 0.0, lambda, 1e-14) +
                                 outer.integrate(f, lambda, std::numeric_limits<double>::infinity(), 1e-14));
    return std::pow(grad, (2.0 - p.s) / (p.N - p.s));
}

double s0_from_moments(const MomentIntegrals& m, const ProblemParams& p) {
    return std::pow(m.at(0), (2.0 - p.N) / (p.N - p.s)) * m.at(1);
}

double cutoff_moment(int N, double s, double a, double b, double eps) {
    const double beta = 2.0 - s;
    const double lambda = std::pow(eps, 1.0 / beta);
    return sphere_area(N) * panel_integral(
                                [&](double r) {
                                    const double phi = cutoff(r);
                                    return phi * phi *
                                           std::exp((N - 1.0 + a) * std::log(r) - b * log_eps_plus(eps, r, beta));
                                },
                                geometric_breaks(lambda, 2.0, {1.0}));
}

std::vector<double> log_space(double lo, double hi, int n) {
    if (!(lo > 0.0) || !(hi >= lo) || n < 1) {
        throw ConfigError("log_space: need 0 < lo <= hi and n >= 1");
    }
    std::vector<double> v(n);
    for (int k = 0; k < n; ++k) {
        v[k] = n == 1 ? lo : std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * k / (n - 1.0));
    }
    return v;
}

ExpansionFit expansion_sweep(const ProblemParams& p, const std::vector<double>& eps, FamilyVariant v) {
    if (eps.size() < 3) {
        throw ConfigError("expansion_sweep: need at least 3 eps values");
    }
    ExpansionFit fit;
    fit.x_power = 2.0 / (2.0 - p.s);
    double xmax = 0.0;
    for (double e : eps) {
        fit.rows.push_back({e, family_quotient(p, e, v)});
        xmax = std::max(xmax, std::pow(e, fit.x_power));
    }
    const auto n = static_cast<Eigen::Index>(eps.size());
    Eigen::MatrixXd X(n, 3);
    Eigen::VectorXd y(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const double x = std::pow(eps[k], fit.x_power) / xmax;
        X(k, 0) = 1.0;
        X(k, 1) = x;
        X(k, 2) = x * x;
        y(k) = fit.rows[k].q.Q_weighted;
    }
    const Eigen::Vector3d coef = X.colPivHouseholderQr().solve(y);
    fit.a = coef(0);
    fit.b = coef(1) / xmax;
    fit.c = coef(2) / (xmax * xmax);
    return fit;
}

}  // namespace hsheat
