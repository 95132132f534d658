#include "hsheat/selfsim.hpp"

#include <algorithm>
#include <cmath>

// Boost 1.74's pchip calls isnan unqualified.
namespace boost::math::interpolators {
using std::isnan;
}
#include <boost/math/interpolators/pchip.hpp>
#include <fmt/format.h>

#include "hsheat/operators.hpp"
#include "hsheat/quadrature.hpp"
#include "hsheat/tridiag.hpp"

namespace hsheat {

namespace {

using Vec = std::vector<double>;

double sup_abs(const Vec& u) {
    double m = 0.0;
    for (double x : u) {
        m = std::max(m, std::abs(x));
    }
    return m;
}

class Stepper {
public:
    Stepper(const RadialField& u0, const ProblemParams& p, double t0, double dt0, const EvolveOptions& opt)
        : grid_(u0.grid_ptr()),
          p_(p),
          opt_(opt),
          n_(u0.size() - 1),
          S_(stiffness_matrix(*grid_, false, n_)),
          m_(mass_diagonal(*grid_, false, n_)),
          u_(u0.values().begin(), u0.values().begin() + static_cast<std::ptrdiff_t>(n_)),
          t_(t0),
          dt_(dt0),
          dt0_(dt0),
          sup0_(sup_abs(u_)) {
        for (double x : u_) {
            if (!std::isfinite(x)) {
                throw ConfigError("evolve: initial field is not finite");
            }
        }
    }

    // Advances to exactly t_end unless the solution blows up first.
    void advance_to(double t_end) {
        while (!blew_up_ && t_ < t_end) {
            const double dt = std::min(dt_, t_end - t_);
            Vec next;
            double change = 0.0;
            if (!try_step(dt, next, change)) {
                continue;
            }
            if (!blew_up_) {
                accept(dt, std::move(next), t_end);
                if (change < 0.25 * opt_.max_change && dt_ < dt0_) {
                    dt_ = std::min(2.0 * dt_, dt0_);
                }
            }
        }
    }

    EvolutionState state() const {
        EvolutionState s;
        s.t = t_;
        Vec full(grid_->size(), 0.0);
        std::copy(u_.begin(), u_.end(), full.begin());
        s.field = RadialField(grid_, std::move(full));
        s.mass_q = integrate_abs_pow(s.field, opt_.mass_exponent.value_or(p_.q), WeightMode::unweighted);
        s.sup_u = sup_abs(u_);
        s.dt_last = dt_last_;
        s.steps = steps_;
        s.rejected = rejected_;
        s.blew_up = blew_up_;
        s.blowup_lo = blowup_lo_;
        s.blowup_hi = blowup_hi_;
        return s;
    }

private:
    Vec reaction(const Vec& u) const {
        Vec f(n_, 0.0);
        if (opt_.reaction) {
            for (std::size_t i = 0; i < n_; ++i) {
                f[i] = std::pow(std::abs(u[i]), p_.q - 2.0) * u[i] * std::pow(grid_->r(i), -p_.s);
            }
        }
        return f;
    }

    const TridiagFactor& factor(double dt) {
        if (!factor_ || dt != factor_dt_) {
            SymTridiag a = S_;
            for (std::size_t i = 0; i < n_; ++i) {
                a.diag[i] = m_[i] + 0.5 * dt * S_.diag[i];
            }
            for (double& o : a.off) {
                o *= 0.5 * dt;
            }
            factor_.emplace(a);
            factor_dt_ = dt;
        }
        return *factor_;
    }

    bool try_step(double dt, Vec& next, double& change) {
        const Vec f = reaction(u_);
        const Vec Su = S_.apply(u_);
        Vec rhs(n_);
        const double w = f_prev_.empty() ? 0.0 : dt / dt_last_;
        for (std::size_t i = 0; i < n_; ++i) {
            const double F = f_prev_.empty() ? f[i] : (1.0 + 0.5 * w) * f[i] - 0.5 * w * f_prev_[i];
            rhs[i] = m_[i] * u_[i] - 0.5 * dt * Su[i] + dt * m_[i] * F;
        }
        next = factor(dt).solve(rhs);
        const double sup_next = sup_abs(next);
        const bool finite = std::all_of(next.begin(), next.end(), [](double x) { return std::isfinite(x); });
        if (!finite || (sup0_ > 0.0 && sup_next > opt_.blowup_factor * sup0_)) {
            blew_up_ = true;
            blowup_lo_ = t_;
            blowup_hi_ = t_ + dt;
            return true;
        }
        double diff = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
            diff = std::max(diff, std::abs(next[i] - u_[i]));
        }
        const double scale = sup_abs(u_);
        change = scale > 0.0 ? diff / scale : 0.0;
        if (change > opt_.max_change) {
            if (dt * 0.5 < opt_.dt_min) {
                throw NumericalError(fmt::format("evolve: step size underflow at t = {}", t_));
            }
            dt_ = 0.5 * dt;
            ++rejected_;
            return false;
        }
        f_curr_ = f;
        return true;
    }

    void accept(double dt, Vec next, double t_end) {
        u_ = std::move(next);
        f_prev_ = std::move(f_curr_);
        dt_last_ = dt;
        t_ = t_end - t_ <= dt ? t_end : t_ + dt;
        ++steps_;
    }

    GridPtr grid_;
    ProblemParams p_;
    EvolveOptions opt_;
    std::size_t n_;
    SymTridiag S_;
    Vec m_;
    Vec u_;
    Vec f_prev_;
    Vec f_curr_;
    double t_;
    double dt_;
    double dt0_;
    double dt_last_ = 0.0;
    double sup0_;
    std::optional<TridiagFactor> factor_;
    double factor_dt_ = 0.0;
    int steps_ = 0;
    int rejected_ = 0;
    bool blew_up_ = false;
    double blowup_lo_ = 0.0;
    double blowup_hi_ = 0.0;
};

void validate_times(double t0, double t1, double dt0) {
    if (!(t0 > 0.0) || !(t1 > t0)) {
        throw ConfigError(fmt::format("evolve: need t1 > t0 > 0 (got t0 = {}, t1 = {})", t0, t1));
    }
    if (!(dt0 > 0.0)) {
        throw ConfigError("evolve: dt0 must be positive");
    }
}

}  // namespace

EvolutionState evolve(const RadialField& u0, const ProblemParams& p, double t0, double t1, double dt0,
                      const EvolveOptions& opt) {
    validate_times(t0, t1, dt0);
    Stepper st(u0, p, t0, dt0, opt);
    st.advance_to(t1);
    return st.state();
}

std::vector<EvolutionState> evolve_series(const RadialField& u0, const ProblemParams& p, double t0,
                                          std::span<const double> times, double dt0, const EvolveOptions& opt) {
    if (times.empty()) {
        throw ConfigError("evolve: no output times");
    }
    validate_times(t0, times.back(), dt0);
    if (!std::is_sorted(times.begin(), times.end()) || times.front() <= t0) {
        throw ConfigError("evolve: output times must increase and exceed t0");
    }
    Stepper st(u0, p, t0, dt0, opt);
    std::vector<EvolutionState> out{st.state()};
    for (double t : times) {
        st.advance_to(t);
        out.push_back(st.state());
        if (out.back().blew_up) {
            break;
        }
    }
    return out;
}

double physical_radius(double R_similarity, double t1) { return 2.0 * R_similarity * std::sqrt(t1); }

RadialField self_similar_profile(const RadialField& v, const GridPtr& physical, double t, double alpha) {
    const auto nodes = v.grid().nodes();
    Vec x(nodes.begin(), nodes.end());
    Vec y(v.values().begin(), v.values().end());
    const double r_first = x.front();
    const double r_last = x.back();
    const double v_first = y.front();
    boost::math::interpolators::pchip<Vec> interp(std::move(x), std::move(y));
    const double scale = std::pow(t, -alpha);
    const double root = std::sqrt(t);
    return RadialField::sample(physical, [&](double r) {
        const double yv = r / root;
        if (yv > r_last) {
            return 0.0;
        }
        return scale * (yv <= r_first ? v_first : interp(yv));
    });
}

double selfsim_error(const RadialField& v, const EvolutionState& state, const ProblemParams& p) {
    const auto target = self_similar_profile(v, state.field.grid_ptr(), state.t, p.alpha_ss);
    const auto diff = state.field.plus(target, -1.0);
    const double num = integrate(diff, diff, WeightMode::unweighted);
    const double den = integrate(state.field, state.field, WeightMode::unweighted);
    if (den == 0.0) {
        return num == 0.0 ? 0.0 : 1.0;
    }
    return std::sqrt(num / den);
}

DecayFit decay_fit(std::span<const EvolutionState> states, const ProblemParams&) {
    Vec lt, lm;
    double t_min = 0.0, t_max = 0.0;
    for (const auto& s : states) {
        if (s.mass_q > 0.0 && s.t > 0.0) {
            lt.push_back(std::log(s.t));
            lm.push_back(std::log(s.mass_q));
            t_min = lt.size() == 1 ? s.t : std::min(t_min, s.t);
            t_max = std::max(t_max, s.t);
        }
    }
    if (lt.size() < 5 || t_max < 10.0 * t_min * (1.0 - 1e-12)) {
        throw ConfigError(fmt::format(
            "decay_fit: need 5 states with positive mass spanning a decade (got {})", lt.size()));
    }
    const double n = static_cast<double>(lt.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < lt.size(); ++i) {
        mx += lt[i] / n;
        my += lm[i] / n;
    }
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < lt.size(); ++i) {
        sxx += (lt[i] - mx) * (lt[i] - mx);
        sxy += (lt[i] - mx) * (lm[i] - my);
        syy += (lm[i] - my) * (lm[i] - my);
    }
    DecayFit fit;
    fit.fitted_exponent = sxy / sxx;
    fit.r2 = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
    fit.used = static_cast<int>(lt.size());
    return fit;
}

nlohmann::json to_json(const EvolutionState& s) {
    return {{"t", s.t},         {"mass_q", s.mass_q},     {"sup_u", s.sup_u},         {"dt_last", s.dt_last},
            {"steps", s.steps}, {"rejected", s.rejected}, {"blew_up", s.blew_up},     {"blowup_lo", s.blowup_lo},
            {"blowup_hi", s.blowup_hi}};
}

nlohmann::json to_json(const DecayFit& f) {
    return {{"fitted_exponent", f.fitted_exponent}, {"r2", f.r2}, {"used", f.used}};
}

}  // namespace hsheat
