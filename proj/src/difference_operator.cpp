#include "kawarada/difference_operator.hpp"

#include "kawarada/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

namespace kawarada {

double DiscreteOperator::b_norm() const {
    return *std::max_element(b_diag.begin(), b_diag.end());
}

Tridiagonal assemble_P(const Grid1D& g) {
    const std::size_t n = g.n_interior();
    Tridiagonal p(n);
    for (std::size_t r = 0; r < n; ++r) {
        const double hm = g.h(r);
        const double hp = g.h(r + 1);
        if (r > 0) p.sub[r - 1] = 2.0 / (hm * (hm + hp));
        p.diag[r] = -2.0 / (hm * hp);
        if (r + 1 < n) p.sup[r] = 2.0 / (hp * (hm + hp));
    }
    return p;
}

DiscreteOperator assemble_M(const Grid1D& g, std::span<const double> sigma, double a) {
    const std::size_t n = g.n_interior();
    if (sigma.size() != n) {
        throw Error(ErrorCode::InvalidArgument,
                    fmt::format("sigma has {} entries, grid has {} interior nodes", sigma.size(), n));
    }
    if (!(a > 0.0)) throw Error(ErrorCode::InvalidArgument, "domain half-width a must be > 0");
    for (std::size_t i = 0; i < n; ++i) {
        if (!(sigma[i] > 0.0)) {
            throw Error(ErrorCode::DegenerateInterior,
                        fmt::format("sigma[{}] = {} is not positive at an interior node", i, sigma[i]));
        }
    }

    DiscreteOperator op;
    op.p = assemble_P(g);
    op.sigma.assign(sigma.begin(), sigma.end());
    op.b_diag.resize(n);
    for (std::size_t i = 0; i < n; ++i) op.b_diag[i] = 1.0 / sigma[i];
    op.a = a;
    std::tie(op.h_min, op.h_max) = grid_extremal_steps(g);

    const double inv_a2 = 1.0 / (a * a);
    op.m = Tridiagonal(n);
    for (std::size_t r = 0; r < n; ++r) {
        const double s = inv_a2 * op.b_diag[r];
        op.m.diag[r] = s * op.p.diag[r];
        if (r > 0) op.m.sub[r - 1] = s * op.p.sub[r - 1];
        if (r + 1 < n) op.m.sup[r] = s * op.p.sup[r];
    }
    return op;
}

double spectral_norm_bound_P(const Grid1D& g) {
    const double h = grid_extremal_steps(g).first;
    return 4.0 / (h * h);
}

double beta_min(const Grid1D& g, std::span<const double> sigma) {
    const double h = grid_extremal_steps(g).first;
    const double b_norm = 1.0 / *std::min_element(sigma.begin(), sigma.end());
    return h * h / (2.0 * b_norm);
}

SymmetrizedForm symmetrize(const Tridiagonal& p, const Grid1D& g) {
    const std::size_t n = p.size();
    SymmetrizedForm out;
    out.d_diag.resize(n);
    const double scale = g.h(0) + g.h(1);
    for (std::size_t j = 0; j < n; ++j) out.d_diag[j] = (g.h(j) + g.h(j + 1)) / scale;

    out.s = Tridiagonal(n);
    out.s.diag = p.diag;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        const double prod = p.sup[k] * p.sub[k];
        if (!(prod > 0.0)) {
            throw Error(ErrorCode::Structure,
                        fmt::format("non-positive coupling product {} at row {}", prod, k));
        }
        out.s.sub[k] = out.s.sup[k] = std::sqrt(prod);
    }
    return out;
}

std::pair<double, double> gershgorin_interval(const DiscreteOperator& op) {
    const auto& m = op.m;
    const std::size_t n = m.size();
    double lo = 0.0;
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        double radius = 0.0;
        if (i > 0) radius += std::abs(m.sub[i - 1]);
        if (i + 1 < n) radius += std::abs(m.sup[i]);
        lo = std::min(lo, m.diag[i] - radius);
        hi = std::max(hi, m.diag[i] + radius);
    }
    // Interior rows have zero row sum; cancellation can leave a few ulps above 0.
    const double tol = 64.0 * std::numeric_limits<double>::epsilon() * std::abs(lo);
    if (hi > tol) {
        throw Error(ErrorCode::Structure,
                    fmt::format("Gershgorin interval reaches {} > 0; M is not negative", hi));
    }
    return {lo, std::min(hi, 0.0)};
}

}  // namespace kawarada
