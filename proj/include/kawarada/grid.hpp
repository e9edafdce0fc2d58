#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

namespace kawarada {

/// Nonuniform grid over the rescaled interval [-1, 1].
///
/// Nodes x_0 = -1 < x_1 < ... < x_{N+1} = 1, with N interior nodes carrying
/// unknowns. Steps h_i = x_{i+1} - x_i, i = 0..N, are derived from the nodes
/// at construction. Immutable once built.
class Grid1D {
public:
    /// Validates and adopts `nodes`. Requires at least one interior node,
    /// exact endpoints and strictly increasing coordinates.
    explicit Grid1D(std::vector<double> nodes);

    std::size_t n_interior() const noexcept { return nodes_.size() - 2; }
    std::span<const double> nodes() const noexcept { return nodes_; }
    std::span<const double> steps() const noexcept { return steps_; }

    /// Interior node i in 1..N.
    double x(std::size_t i) const { return nodes_[i]; }
    double h(std::size_t i) const { return steps_[i]; }

    /// Interior coordinates x_1..x_N.
    std::span<const double> interior() const noexcept {
        return std::span<const double>(nodes_).subspan(1, n_interior());
    }

    bool is_symmetric(double tol = 1e-12) const;

private:
    std::vector<double> nodes_;
    std::vector<double> steps_;
};

struct Grid2D {
    Grid1D gx;
    Grid1D gy;

    std::size_t nx() const noexcept { return gx.n_interior(); }
    std::size_t ny() const noexcept { return gy.n_interior(); }
    std::size_t size() const noexcept { return nx() * ny(); }
};

Grid1D make_uniform_grid(std::size_t n_interior);

/// Equidistributes the parabolic monitor
///   m(x) = 1 + (ratio - 1) * (1 - ((x - center) / w)^2),  w = max(1 + center, 1 - center),
/// so every cell carries the same integral of m. Cells are finest near
/// `center` and coarsest at the far boundary, with h_max / h_min close to `ratio`.
/// A zero center yields an exactly mirror-symmetric grid (x_i == -x_{N+1-i}).
Grid1D make_parabolic_arclength_grid(std::size_t n_interior, double refinement_ratio,
                                     double center);

/// Monitor density used by make_parabolic_arclength_grid.
double parabolic_monitor(double x, double refinement_ratio, double center);

std::pair<double, double> grid_extremal_steps(const Grid1D& g);

/// CSV with header `index,x`, one row per node including the endpoints.
void write_grid_csv(std::ostream& os, const Grid1D& g);
Grid1D read_grid_csv(std::istream& is);

}  // namespace kawarada
