#include "kawarada/tridiagonal.hpp"

#include "kawarada/error.hpp"

#include <cmath>
#include <limits>

namespace kawarada {

void Tridiagonal::apply(std::span<const double> x, std::span<double> y) const {
    const std::size_t n = size();
    if (n == 1) {
        y[0] = diag[0] * x[0];
        return;
    }
    y[0] = diag[0] * x[0] + sup[0] * x[1];
    for (std::size_t i = 1; i + 1 < n; ++i) {
        y[i] = sub[i - 1] * x[i - 1] + diag[i] * x[i] + sup[i] * x[i + 1];
    }
    y[n - 1] = sub[n - 2] * x[n - 2] + diag[n - 1] * x[n - 1];
}

std::vector<double> Tridiagonal::apply(std::span<const double> x) const {
    std::vector<double> y(size());
    apply(x, y);
    return y;
}

Tridiagonal Tridiagonal::shifted_identity(double s) const {
    Tridiagonal out(size());
    for (std::size_t i = 0; i < size(); ++i) out.diag[i] = 1.0 + s * diag[i];
    for (std::size_t i = 0; i < sub.size(); ++i) {
        out.sub[i] = s * sub[i];
        out.sup[i] = s * sup[i];
    }
    return out;
}

void thomas_solve(const Tridiagonal& a, std::span<const double> rhs, std::span<double> x,
                  std::span<double> scratch) {
    const std::size_t n = a.size();
    auto& c = scratch;  // modified super-diagonal
    double pivot = a.diag[0];
    if (std::abs(pivot) <= std::numeric_limits<double>::min()) {
        throw Error(ErrorCode::Structure, "zero pivot in tridiagonal solve at row 0");
    }
    x[0] = rhs[0] / pivot;
    for (std::size_t i = 1; i < n; ++i) {
        c[i - 1] = a.sup[i - 1] / pivot;
        pivot = a.diag[i] - a.sub[i - 1] * c[i - 1];
        if (std::abs(pivot) <= std::numeric_limits<double>::min()) {
            throw Error(ErrorCode::Structure, "zero pivot in tridiagonal solve");
        }
        x[i] = (rhs[i] - a.sub[i - 1] * x[i - 1]) / pivot;
    }
    for (std::size_t i = n - 1; i-- > 0;) x[i] -= c[i] * x[i + 1];
}

std::vector<double> thomas_solve(const Tridiagonal& a, std::span<const double> rhs) {
    std::vector<double> x(a.size());
    std::vector<double> scratch(a.size());
    thomas_solve(a, rhs, x, scratch);
    return x;
}

}  // namespace kawarada
