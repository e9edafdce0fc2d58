#include "kawarada/grid.hpp"

#include "kawarada/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>

namespace kawarada {

Grid1D::Grid1D(std::vector<double> nodes) : nodes_(std::move(nodes)) {
    if (nodes_.size() < 3) {
        throw Error(ErrorCode::InvalidArgument, "grid needs at least one interior node");
    }
    if (nodes_.front() != -1.0 || nodes_.back() != 1.0) {
        throw Error(ErrorCode::InvalidArgument, "grid endpoints must be exactly -1 and 1");
    }
    steps_.resize(nodes_.size() - 1);
    for (std::size_t i = 0; i + 1 < nodes_.size(); ++i) {
        steps_[i] = nodes_[i + 1] - nodes_[i];
        if (!(steps_[i] > 0.0)) {
            throw Error(ErrorCode::InvalidArgument,
                        fmt::format("grid nodes not strictly increasing at index {}", i));
        }
    }
}

bool Grid1D::is_symmetric(double tol) const {
    const std::size_t last = nodes_.size() - 1;
    for (std::size_t i = 0; i <= last; ++i) {
        if (std::abs(nodes_[i] + nodes_[last - i]) > tol) return false;
    }
    return true;
}

Grid1D make_uniform_grid(std::size_t n_interior) {
    if (n_interior < 1) {
        throw Error(ErrorCode::InvalidArgument, "uniform grid needs n_interior >= 1");
    }
    const std::size_t cells = n_interior + 1;
    std::vector<double> x(cells + 1);
    // Integer numerator keeps x_i == -x_{N+1-i} bit-for-bit.
    for (std::size_t i = 0; i <= cells; ++i) {
        x[i] = (2.0 * static_cast<double>(i) - static_cast<double>(cells)) /
               static_cast<double>(cells);
    }
    return Grid1D(std::move(x));
}

double parabolic_monitor(double x, double refinement_ratio, double center) {
    const double w = std::max(1.0 + center, 1.0 - center);
    const double s = (x - center) / w;
    return std::max(1.0, 1.0 + (refinement_ratio - 1.0) * (1.0 - s * s));
}

namespace {

// Closed-form integral of the parabolic monitor from -1 to x. On [-1, 1] the
// parabola never drops below 1, so the clip is inactive.
double monitor_integral(double x, double r, double c, double w) {
    const double lo = -1.0 - c;
    const double hi = x - c;
    return (x + 1.0) + (r - 1.0) * ((x + 1.0) - (hi * hi * hi - lo * lo * lo) / (3.0 * w * w));
}

double invert_monitor_integral(double target, double r, double c, double w) {
    double lo = -1.0;
    double hi = 1.0;
    double x = -1.0 + 2.0 * target / monitor_integral(1.0, r, c, w);
    for (int it = 0; it < 100; ++it) {
        const double f = monitor_integral(x, r, c, w) - target;
        if (f > 0.0) hi = x; else lo = x;
        const double step = f / parabolic_monitor(x, r, c);
        double next = x - step;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - x) <= 1e-16 * (1.0 + std::abs(x))) return next;
        x = next;
    }
    return x;
}

}  // namespace

Grid1D make_parabolic_arclength_grid(std::size_t n_interior, double refinement_ratio,
                                     double center) {
    if (n_interior < 3) {
        throw Error(ErrorCode::InvalidArgument, "parabolic grid needs n_interior >= 3");
    }
    if (!(refinement_ratio >= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "refinement ratio must be >= 1");
    }
    if (!(center > -1.0 && center < 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "grid center must lie in (-1, 1)");
    }
    if (refinement_ratio == 1.0) return make_uniform_grid(n_interior);

    const double w = std::max(1.0 + center, 1.0 - center);
    const std::size_t cells = n_interior + 1;
    const double total = monitor_integral(1.0, refinement_ratio, center, w);

    std::vector<double> x(cells + 1);
    x.front() = -1.0;
    x.back() = 1.0;
    for (std::size_t i = 1; i < cells; ++i) {
        const double target = total * static_cast<double>(i) / static_cast<double>(cells);
        x[i] = invert_monitor_integral(target, refinement_ratio, center, w);
    }

    // Endpoints are pinned above; the closed-form integral leaves no drift to rescale.
    if (center == 0.0) {
        for (std::size_t i = 1; i < cells - i; ++i) {
            const double m = 0.5 * (x[i] - x[cells - i]);
            x[i] = m;
            x[cells - i] = -m;
        }
        if (cells % 2 == 0) x[cells / 2] = 0.0;
    }
    return Grid1D(std::move(x));
}

std::pair<double, double> grid_extremal_steps(const Grid1D& g) {
    const auto [lo, hi] = std::minmax_element(g.steps().begin(), g.steps().end());
    return {*lo, *hi};
}

void write_grid_csv(std::ostream& os, const Grid1D& g) {
    os << "index,x\n";
    for (std::size_t i = 0; i < g.nodes().size(); ++i) {
        os << fmt::format("{},{}\n", i, g.nodes()[i]);
    }
}

Grid1D read_grid_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != "index,x") {
        throw Error(ErrorCode::InvalidArgument, "grid CSV must start with header 'index,x'");
    }
    std::vector<double> x;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw Error(ErrorCode::InvalidArgument, "malformed grid CSV row: " + line);
        }
        const auto idx = std::stoul(line.substr(0, comma));
        if (idx != x.size()) {
            throw Error(ErrorCode::InvalidArgument, "grid CSV indices must be consecutive");
        }
        x.push_back(std::stod(line.substr(comma + 1)));
    }
    return Grid1D(std::move(x));
}

}  // namespace kawarada
