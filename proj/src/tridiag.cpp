#include "hsheat/tridiag.hpp"

#include "hsheat/params.hpp"

namespace hsheat {

std::vector<double> SymTridiag::apply(std::span<const double> x) const {
    const std::size_t n = diag.size();
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        double v = diag[i] * x[i];
        if (i > 0) {
            v += off[i - 1] * x[i - 1];
        }
        if (i + 1 < n) {
            v += off[i] * x[i + 1];
        }
        y[i] = v;
    }
    return y;
}

double SymTridiag::quad_form(std::span<const double> x) const {
    double s = 0.0;
    for (std::size_t i = 0; i < diag.size(); ++i) {
        s += diag[i] * x[i] * x[i];
        if (i + 1 < diag.size()) {
            s += 2.0 * off[i] * x[i] * x[i + 1];
        }
    }
    return s;
}

TridiagFactor::TridiagFactor(const SymTridiag& a) : d_(a.diag.size()), l_(a.off.size()) {
    const std::size_t n = a.diag.size();
    if (n == 0) {
        throw NumericalError("TridiagFactor: empty matrix");
    }
    d_[0] = a.diag[0];
    spd_ = d_[0] > 0.0;
    for (std::size_t i = 1; i < n; ++i) {
        if (d_[i - 1] == 0.0) {
            throw NumericalError("TridiagFactor: zero pivot");
        }
        l_[i - 1] = a.off[i - 1] / d_[i - 1];
        d_[i] = a.diag[i] - l_[i - 1] * a.off[i - 1];
        spd_ = spd_ && d_[i] > 0.0;
    }
}

std::vector<double> TridiagFactor::solve(std::span<const double> rhs) const {
    const std::size_t n = d_.size();
    std::vector<double> x(rhs.begin(), rhs.end());
    for (std::size_t i = 1; i < n; ++i) {
        x[i] -= l_[i - 1] * x[i - 1];
    }
    for (std::size_t i = 0; i < n; ++i) {
        x[i] /= d_[i];
    }
    for (std::size_t i = n - 1; i-- > 0;) {
        x[i] -= l_[i] * x[i + 1];
    }
    return x;
}

}  // namespace hsheat
