#pragma once

#include <stdexcept>
#include <string>

namespace hsheat {

/// Thrown when user-supplied parameters violate a documented range.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Thrown when a numerical procedure cannot produce a trustworthy result
/// (overflow despite log-space guards, iteration caps, step underflow).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/**
 * Problem data for  -Δv - ½ y·∇v = α v + |v|^{q-2} v / |y|^s  on R^N.
 *
 * `alpha` is the free linear parameter of the elliptic problem; `alpha_ss`
 * is the self-similar exponent (2-s)/(2q-4) that links the elliptic profile
 * to the heat flow u(x,t) = t^{-alpha_ss} v(x/√t). They only coincide when
 * the caller asks for it (see `self_similar`).
 */
struct ProblemParams {
    int N = 3;
    double s = 0.0;
    double q = 3.0;
    double alpha = 0.0;
    double crit_exp = 3.0;  ///< 2*(s) = (2N-2s)/(N-2)
    double alpha_ss = 0.5;  ///< (2-s)/(2q-4)

    /// Validates ranges and fills the derived exponents.
    static ProblemParams make(int N, double s, double q, double alpha);

    /// Same, with alpha set to the self-similar exponent.
    static ProblemParams self_similar(int N, double s, double q);

    /// Critical problem q = 2*(s).
    static ProblemParams critical(int N, double s, double alpha);

    [[nodiscard]] bool is_critical() const;
    [[nodiscard]] ProblemParams with_alpha(double a) const;
};

/// 2*(s) = (2N - 2s)/(N - 2)
double critical_exponent(int N, double s);

}  // namespace hsheat
