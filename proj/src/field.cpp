#include "hsheat/field.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "hsheat/params.hpp"

namespace hsheat {

RadialField::RadialField(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    if (!grid_) {
        throw ConfigError("field: null grid");
    }
    if (values_.size() != grid_->size()) {
        throw ConfigError(
            fmt::format("field: {} values for a grid of {} nodes", values_.size(), grid_->size()));
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i])) {
            throw NumericalError(fmt::format("field: non-finite value at node {} (r = {})", i, grid_->r(i)));
        }
    }
}

RadialField RadialField::zeros(GridPtr grid) {
    const auto n = grid->size();
    return RadialField(std::move(grid), std::vector<double>(n, 0.0));
}

RadialField RadialField::sample(GridPtr grid, const std::function<double(double)>& f) {
    std::vector<double> v(grid->size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] = f(grid->r(i));
    }
    return RadialField(std::move(grid), std::move(v));
}

double RadialField::max_abs() const {
    double m = 0.0;
    for (double x : values_) {
        m = std::max(m, std::abs(x));
    }
    return m;
}

RadialField RadialField::scaled(double c) const {
    std::vector<double> v(values_);
    for (double& x : v) {
        x *= c;
    }
    return RadialField(grid_, std::move(v));
}

RadialField RadialField::plus(const RadialField& o, double c) const {
    require_same_grid(o);
    std::vector<double> v(values_);
    for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] += c * o.values_[i];
    }
    return RadialField(grid_, std::move(v));
}

void RadialField::require_same_grid(const RadialField& o) const {
    if (grid_ != o.grid_ && !(*grid_ == *o.grid_)) {
        throw ConfigError("fields live on different grids");
    }
}

}  // namespace hsheat
