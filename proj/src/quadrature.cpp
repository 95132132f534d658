#include "hsheat/quadrature.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "hsheat/params.hpp"

namespace hsheat {

std::string_view to_string(WeightMode m) {
    switch (m) {
        case WeightMode::K: return "K";
        case WeightMode::K_over_rs: return "K_over_rs";
        case WeightMode::unweighted: return "unweighted";
        case WeightMode::inv_rs: return "inv_rs";
        case WeightMode::r_squared: return "r_squared";
        case WeightMode::inv_r2_K: return "inv_r2_K";
    }
    return "?";
}

double log_density(WeightMode mode, double r, double s) {
    const double lr = std::log(r);
    switch (mode) {
        case WeightMode::K: return 0.25 * r * r;
        case WeightMode::K_over_rs: return 0.25 * r * r - s * lr;
        case WeightMode::unweighted: return 0.0;
        case WeightMode::inv_rs: return -s * lr;
        case WeightMode::r_squared: return 2.0 * lr;
        case WeightMode::inv_r2_K: return 0.25 * r * r - 2.0 * lr;
    }
    return std::numeric_limits<double>::quiet_NaN();
}

namespace {

template <class Term>
double accumulate(const RadialGrid& g, WeightMode mode, double s, Term&& log_abs_and_sign) {
    double sum = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        double sign = 0.0;
        const double la = log_abs_and_sign(i, sign);
        if (sign == 0.0) {
            continue;
        }
        sum += sign * std::exp(std::log(g.w(i)) + la + log_density(mode, g.r(i), s));
    }
    if (!std::isfinite(sum)) {
        throw NumericalError(fmt::format(
            "integrate({}): non-finite accumulation; grid R_max = {} too large for these data",
            to_string(mode), g.R_max()));
    }
    return sum;
}

}  // namespace

double integrate(const RadialField& f, const RadialField& g, WeightMode mode, double s) {
    f.require_same_grid(g);
    return accumulate(f.grid(), mode, s, [&](std::size_t i, double& sign) {
        const double a = f[i];
        const double b = g[i];
        if (a == 0.0 || b == 0.0) {
            return 0.0;
        }
        sign = (a > 0) == (b > 0) ? 1.0 : -1.0;
        return std::log(std::abs(a)) + std::log(std::abs(b));
    });
}

double integrate(const RadialField& f, WeightMode mode, double s) {
    return accumulate(f.grid(), mode, s, [&](std::size_t i, double& sign) {
        const double a = f[i];
        if (a == 0.0) {
            return 0.0;
        }
        sign = a > 0 ? 1.0 : -1.0;
        return std::log(std::abs(a));
    });
}

double integrate_abs_pow(const RadialField& f, double p, WeightMode mode, double s) {
    return accumulate(f.grid(), mode, s, [&](std::size_t i, double& sign) {
        const double a = f[i];
        if (a == 0.0) {
            return 0.0;
        }
        sign = 1.0;
        return p * std::log(std::abs(a));
    });
}

double gradient_form(const RadialField& f, const RadialField& g, bool weighted) {
    f.require_same_grid(g);
    const RadialGrid& grid = f.grid();
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        const double df = f[i + 1] - f[i];
        const double dg = g[i + 1] - g[i];
        if (df == 0.0 || dg == 0.0) {
            continue;
        }
        double la = std::log(grid.flux_coeff(i)) + std::log(std::abs(df)) + std::log(std::abs(dg));
        if (weighted) {
            const double rm = grid.cell_mid(i);
            la += 0.25 * rm * rm;
        }
        sum += ((df > 0) == (dg > 0) ? 1.0 : -1.0) * std::exp(la);
    }
    if (!std::isfinite(sum)) {
        throw NumericalError("gradient_form: non-finite accumulation");
    }
    return sum;
}

}  // namespace hsheat
