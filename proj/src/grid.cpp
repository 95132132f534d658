#include "hsheat/grid.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "hsheat/params.hpp"

namespace hsheat {

double sphere_area(int N) {
    return 2.0 * std::pow(std::numbers::pi, 0.5 * N) / std::tgamma(0.5 * N);
}

namespace {

// ∫_a^b r^{N-1} dr = (b - a)·Σ_k a^k b^{N-1-k} / N, free of cancellation.
double shell_moment(int N, double a, double b) {
    double sum = 0.0;
    double ak = 1.0;
    for (int k = 0; k < N; ++k) {
        sum += ak * std::pow(b, N - 1 - k);
        ak *= a;
    }
    return (b - a) * sum / N;
}

}  // namespace

RadialGrid::RadialGrid(int N, double R_max, int M, double grading, double radius_cap)
    : N_(N), R_max_(R_max), M_(M), grading_(grading), omega_(sphere_area(N)) {
    if (N < 3) {
        throw ConfigError(fmt::format("grid.N: dimension must be >= 3 (got {})", N));
    }
    if (!(R_max > 0.0) || R_max > radius_cap) {
        throw ConfigError(fmt::format("grid.R_max: must lie in (0, {}] (got {})", radius_cap, R_max));
    }
    if (M < 16) {
        throw ConfigError(fmt::format("grid.M: need at least 16 nodes (got {})", M));
    }
    if (!(grading >= 1.0)) {
        throw ConfigError(fmt::format("grid.grading: must be >= 1 (got {})", grading));
    }

    nodes_.resize(M);
    for (int i = 1; i <= M; ++i) {
        nodes_[i - 1] = R_max * std::pow(static_cast<double>(i) / M, grading);
    }
    nodes_.back() = R_max;

    weights_.resize(M);
    for (int i = 0; i < M; ++i) {
        const double a = i == 0 ? nodes_[0] : 0.5 * (nodes_[i - 1] + nodes_[i]);
        const double b = i == M - 1 ? nodes_[i] : 0.5 * (nodes_[i] + nodes_[i + 1]);
        const bool coarse = i + 1 < M && cell_width(i) > kTrapezoidSwitch * nodes_[i];
        weights_[i] = coarse ? omega_ * shell_moment(N, a, b)
                             : omega_ * std::pow(nodes_[i], N - 1) * (b - a);
    }

    flux_.resize(M - 1);
    for (int i = 0; i + 1 < M; ++i) {
        flux_[i] = omega_ * std::pow(cell_mid(i), N - 1) / cell_width(i);
    }
}

bool RadialGrid::operator==(const RadialGrid& o) const {
    return N_ == o.N_ && R_max_ == o.R_max_ && M_ == o.M_ && grading_ == o.grading_;
}

GridPtr make_grid(int N, double R_max, int M, double grading) {
    return std::make_shared<const RadialGrid>(N, R_max, M, grading);
}

GridPtr make_physical_grid(int N, double R_max, int M, double grading) {
    return std::make_shared<const RadialGrid>(N, R_max, M, grading, kMaxPhysicalRadius);
}

}  // namespace hsheat
