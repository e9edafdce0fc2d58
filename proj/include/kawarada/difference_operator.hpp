#pragma once

#include "kawarada/grid.hpp"
#include "kawarada/tridiagonal.hpp"

#include <span>
#include <utility>
#include <vector>

namespace kawarada {

/// Scaled, degeneracy-weighted diffusion operator M = (1/a^2) B P with
/// B = diag(1/sigma_i) and P the nonuniform second difference.
///
/// Holds P and the scaled tridiagonal M side by side; the production path only
/// ever applies or solves with tridiagonals.
struct DiscreteOperator {
    Tridiagonal p;
    Tridiagonal m;
    std::vector<double> b_diag;  // 1 / sigma_i
    std::vector<double> sigma;
    double a = 1.0;
    double h_min = 0.0;
    double h_max = 0.0;

    std::size_t size() const noexcept { return sigma.size(); }

    /// ||B||_2 = max_i 1/sigma_i
    double b_norm() const;

    /// I - (tau/2) M, the implicit Crank-Nicolson factor.
    Tridiagonal implicit_factor(double tau) const { return m.shifted_identity(-0.5 * tau); }
    /// I + (tau/2) M, the explicit Crank-Nicolson factor.
    Tridiagonal explicit_factor(double tau) const { return m.shifted_identity(0.5 * tau); }
};

/// Congruence P = D^{-1/2} S D^{1/2} with S symmetric tridiagonal.
struct SymmetrizedForm {
    std::vector<double> d_diag;  // delta_j = (h_{j-1} + h_j) / (h_0 + h_1)
    Tridiagonal s;               // off-diagonal alpha_k = sqrt(n_k l_k)
};

/// Row i (interior node x_i) carries
///   2/(h_{i-1}(h_{i-1}+h_i)),  -2/(h_{i-1} h_i),  2/(h_i(h_{i-1}+h_i)),
/// which differentiates quadratics exactly on any grid.
Tridiagonal assemble_P(const Grid1D& g);

DiscreteOperator assemble_M(const Grid1D& g, std::span<const double> sigma, double a);

/// max_i 4 / h_i^2, an upper bound for ||P||_2.
double spectral_norm_bound_P(const Grid1D& g);

/// h_min^2 / (2 max_i 1/sigma_i)
double beta_min(const Grid1D& g, std::span<const double> sigma);

SymmetrizedForm symmetrize(const Tridiagonal& p, const Grid1D& g);

/// Real-axis projection of the Gershgorin discs of M. Throws Error(Structure)
/// if the interval reaches into the right half-plane.
std::pair<double, double> gershgorin_interval(const DiscreteOperator& op);

}  // namespace kawarada
