#pragma once

#include <array>
#include <cmath>
#include <random>

#include "hsheat/field.hpp"

namespace hsheat::testing {

inline double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

inline GridPtr default_grid(int N) { return make_grid(N, 16.0, 4000, 2.0); }

inline RadialField gaussian(const GridPtr& g) {
    return RadialField::sample(g, [](double r) { return std::exp(-0.25 * r * r); });
}

// Positive random bumps under e^{-r²/8}, zero at R_max.
inline RadialField random_admissible(const GridPtr& g, std::mt19937& rng) {
    std::uniform_real_distribution<double> amp(0.2, 1.0);
    std::uniform_real_distribution<double> ctr(0.0, 2.5);
    std::uniform_real_distribution<double> wid(0.3, 1.5);
    std::array<double, 3> a{}, c{}, w{};
    for (int k = 0; k < 3; ++k) {
        a[k] = amp(rng);
        c[k] = ctr(rng);
        w[k] = wid(rng);
    }
    const double R = g->R_max();
    return RadialField::sample(g, [&](double r) {
        double v = 0.0;
        for (int k = 0; k < 3; ++k) {
            v += a[k] * std::exp(-(r - c[k]) * (r - c[k]) / (w[k] * w[k]));
        }
        return v * (1.0 - r / R) * std::exp(-0.125 * r * r);
    });
}

}  // namespace hsheat::testing
