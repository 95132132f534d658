#include "hsheat/params.hpp"

#include <cmath>
#include <fmt/format.h>

namespace hsheat {

double critical_exponent(int N, double s) {
    return (2.0 * N - 2.0 * s) / (N - 2.0);
}

ProblemParams ProblemParams::make(int N, double s, double q, double alpha) {
    if (N < 3) {
        throw ConfigError(fmt::format("N: dimension must be >= 3 (got {})", N));
    }
    if (!(s >= 0.0 && s < 2.0)) {
        throw ConfigError(fmt::format("s: singularity must lie in [0, 2) (got {})", s));
    }
    if (!std::isfinite(alpha)) {
        throw ConfigError("alpha: must be finite");
    }
    ProblemParams p;
    p.N = N;
    p.s = s;
    p.crit_exp = critical_exponent(N, s);
    // Tolerate round-off when the caller passes a decimal rendering of 2*(s).
    if (std::abs(q - p.crit_exp) <= 1e-12 * p.crit_exp) {
        q = p.crit_exp;
    }
    if (!(q > 2.0 && q <= p.crit_exp)) {
        throw ConfigError(
            fmt::format("q: exponent must satisfy 2 < q <= 2*(s) = {} (got {})", p.crit_exp, q));
    }
    p.q = q;
    p.alpha = alpha;
    p.alpha_ss = (2.0 - s) / (2.0 * q - 4.0);
    return p;
}

ProblemParams ProblemParams::self_similar(int N, double s, double q) {
    ProblemParams p = make(N, s, q, 0.0);
    p.alpha = p.alpha_ss;
    return p;
}

ProblemParams ProblemParams::critical(int N, double s, double alpha) {
    return make(N, s, critical_exponent(N, s), alpha);
}

bool ProblemParams::is_critical() const { return q == crit_exp; }

ProblemParams ProblemParams::with_alpha(double a) const {
    return make(N, s, q, a);
}

}  // namespace hsheat
