#pragma once

#include "kawarada/grid.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace kawarada {

/// Reaction term g_i(v) = phi_i * f(v_i) / sigma_i with f(u) = (1 - u)^{-theta}.
struct SourceModel {
    double theta = 1.0;
    std::vector<double> phi;    // stochastic weight phi(eps_i), all > 0
    std::vector<double> sigma;  // degeneracy at interior nodes, all > 0

    static constexpr double f0 = 1.0;

    std::size_t size() const noexcept { return phi.size(); }
    double phi_max() const;
    double sigma_min() const;

    /// Checks sizes, positivity of phi and sigma, and theta > 0.
    void validate() const;
};

/// Deterministic source: phi == 1 everywhere.
SourceModel make_source(std::span<const double> sigma, double theta = 1.0);
SourceModel make_source(std::vector<double> phi, std::vector<double> sigma, double theta = 1.0);

/// (1 - u)^{-theta}. Throws QuenchOverflow for u >= 1.
double f_eval(double u, double theta);

/// d f / d u = theta (1 - u)^{-theta-1}
double f_derivative(double u, double theta);

std::vector<double> g_eval(std::span<const double> v, const SourceModel& model);

/// Writes g(v) into `out` and returns ||g(v)||_inf.
double g_eval(std::span<const double> v, const SourceModel& model, std::span<double> out);

/// Diagonal of the Jacobian dg/dv: phi_i theta (1 - v_i)^{-theta-1} / sigma_i.
std::vector<double> g_jacobian_diag(std::span<const double> v, const SourceModel& model);

/// sigma(x) = (x + 1)^p (1 - x)^{1 - p}; throws BoundaryDegeneracy for |x| >= 1.
double sigma_degenerate(double x, double p);

/// sigma_degenerate sampled at the interior nodes of g.
std::vector<double> sigma_on_grid(const Grid1D& g, double p);

struct NoiseSpec {
    std::uint64_t seed = 0;
    double lo = 0.01;
    double hi = 1.0;
};

/// SplitMix64 (Steele, Lea & Flood 2014; constants as in Vigna's reference
/// splitmix64.c). Counter-based: draw k is mix(seed + (k + 1) * golden_gamma),
/// so any vector is reproducible bit-for-bit from its seed.
class SplitMix64 {
public:
    static constexpr std::uint64_t golden_gamma = 0x9E3779B97F4A7C15ULL;

    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += golden_gamma);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Top 53 bits mapped to [0, 1).
    double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t state_;
};

/// n draws uniform on [lo, hi] via lo + (hi - lo) * unit.
std::vector<double> sample_noise(std::size_t n, const NoiseSpec& spec);

/// phi(eps) = eps^2 applied componentwise.
std::vector<double> phi_squared(std::span<const double> eps);

/// CSV with header `index,epsilon`.
void write_noise_csv(std::ostream& os, std::span<const double> eps);
std::vector<double> read_noise_csv(std::istream& is);

}  // namespace kawarada
