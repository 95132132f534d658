#pragma once

#include <functional>
#include <span>
#include <vector>

#include "hsheat/grid.hpp"

namespace hsheat {

/// Nodal values of a radial function on a shared, immutable grid.
class RadialField {
public:
    RadialField() = default;
    RadialField(GridPtr grid, std::vector<double> values);

    static RadialField zeros(GridPtr grid);
    static RadialField sample(GridPtr grid, const std::function<double(double)>& f);

    [[nodiscard]] const GridPtr& grid_ptr() const { return grid_; }
    [[nodiscard]] const RadialGrid& grid() const { return *grid_; }
    [[nodiscard]] std::size_t size() const { return values_.size(); }
    [[nodiscard]] std::span<const double> values() const { return values_; }
    [[nodiscard]] double operator[](std::size_t i) const { return values_[i]; }
    [[nodiscard]] double max_abs() const;

    [[nodiscard]] RadialField scaled(double c) const;
    [[nodiscard]] RadialField plus(const RadialField& o, double c = 1.0) const;

    /// Throws unless both fields live on the same grid.
    void require_same_grid(const RadialField& o) const;

private:
    GridPtr grid_;
    std::vector<double> values_;
};

}  // namespace hsheat
