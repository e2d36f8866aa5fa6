#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "sublab/test_function.hpp"

namespace sublab {

/// Uniform grid on [lo, hi] with n_points >= 2 nodes.
struct Grid {
    double lo;
    double hi;
    int n_points;

    Grid(double lo_, double hi_, int n_points_) : lo(lo_), hi(hi_), n_points(n_points_) {
        if (!(lo < hi)) throw std::invalid_argument("Grid: lo must be < hi");
        if (n_points < 2) throw std::invalid_argument("Grid: n_points must be >= 2");
    }

    double dx() const { return (hi - lo) / (n_points - 1); }
    double point(int j) const { return lo + dx() * j; }

    /// Symmetric grid around 0 with the given spacing, covering at least
    /// [-radius, radius]. 0 is always a node, so dyadic spacings keep
    /// dyadic states exactly on the grid.
    static Grid symmetric(double radius, double spacing) {
        if (!(radius > 0.0) || !(spacing > 0.0))
            throw std::invalid_argument("Grid::symmetric: radius and spacing must be > 0");
        const int half = static_cast<int>(std::ceil(radius / spacing - 1e-12));
        const double r = half * spacing;
        return Grid(-r, r, 2 * half + 1);
    }
};

/// Values on a uniform grid with linear interpolation inside [lo, hi] and
/// constant extension beyond.
class ValueFunction {
public:
    ValueFunction(Grid grid, std::vector<double> values)
        : grid_(grid), values_(std::move(values)) {
        if (static_cast<int>(values_.size()) != grid_.n_points)
            throw std::invalid_argument("ValueFunction: values size must match grid");
    }

    static ValueFunction sample(const Grid& g, const TestFunction& phi) {
        std::vector<double> v(static_cast<std::size_t>(g.n_points));
        for (int j = 0; j < g.n_points; ++j) v[static_cast<std::size_t>(j)] = phi(g.point(j));
        return ValueFunction(g, std::move(v));
    }

    double operator()(double x) const {
        if (x <= grid_.lo) return values_.front();
        if (x >= grid_.hi) return values_.back();
        const double u = (x - grid_.lo) / grid_.dx();
        int j = static_cast<int>(u);
        if (j >= grid_.n_points - 1) j = grid_.n_points - 2;
        const double t = u - j;
        const double a = values_[static_cast<std::size_t>(j)];
        return a + t * (values_[static_cast<std::size_t>(j) + 1] - a);
    }

    const Grid& grid() const { return grid_; }
    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }

private:
    Grid grid_;
    std::vector<double> values_;
};

} // namespace sublab
