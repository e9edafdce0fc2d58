#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace kawarada {

/// Tridiagonal matrix stored by diagonals. For size N: sub and sup hold N-1
/// entries; sub[i] couples row i+1 to column i, sup[i] couples row i to column i+1.
struct Tridiagonal {
    std::vector<double> sub;
    std::vector<double> diag;
    std::vector<double> sup;

    Tridiagonal() = default;
    explicit Tridiagonal(std::size_t n) : sub(n ? n - 1 : 0), diag(n), sup(n ? n - 1 : 0) {}

    std::size_t size() const noexcept { return diag.size(); }

    /// y = A x
    void apply(std::span<const double> x, std::span<double> y) const;
    std::vector<double> apply(std::span<const double> x) const;

    /// I + s * A
    Tridiagonal shifted_identity(double s) const;
};

/// Thomas elimination without pivoting. `scratch` must hold size() entries.
/// Throws Error(Structure) on a vanishing pivot.
void thomas_solve(const Tridiagonal& a, std::span<const double> rhs, std::span<double> x,
                  std::span<double> scratch);

std::vector<double> thomas_solve(const Tridiagonal& a, std::span<const double> rhs);

}  // namespace kawarada
