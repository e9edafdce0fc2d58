#pragma once

#include "kawarada/difference_operator.hpp"
#include "kawarada/error.hpp"
#include "kawarada/solver.hpp"

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace kawarada {

// Dense oracles for small operators. Everything here is test scale (N <= 64)
// and deliberately kept out of the production stepping path.

using DenseMatrix = Eigen::MatrixXd;

inline constexpr long dense_cap = 64;

DenseMatrix to_dense(const Tridiagonal& t);
DenseMatrix dense_M(const DiscreteOperator& op);

/// mu(A) = lambda_max((A + A^T) / 2). Throws InvalidArgument for non-square
/// input or N > 64.
double logarithmic_norm(const DenseMatrix& a);

/// exp(t A) by scaling and squaring of a truncated Taylor series.
/// Throws Range if the result overflows.
DenseMatrix matrix_exp_oracle(const DenseMatrix& a, double t);

/// (I - tau/2 M)^{-1} (I + tau/2 M)
DenseMatrix pade_factor(const DenseMatrix& m, double tau);

/// ||exp(tau M) - pade_factor(M, tau)||_2
double pade_local_error(const DenseMatrix& m, double tau);

double spectral_norm(const DenseMatrix& a);

std::vector<std::complex<double>> dense_eigenvalues(const DenseMatrix& a);

/// Diagonal similarity weights w with W M W^{-1} symmetric.
///   Sigma:   w_i = sqrt(sigma_i)             (B^{-1/2}; exact on uniform grids)
///   Grid:    w_i = sqrt(delta_i * sigma_i)   ((D B^{-1})^{1/2}; exact on any grid)
enum class Weight { Sigma, Grid };
std::vector<double> similarity_weights(const DiscreteOperator& op, const Grid1D& g, Weight w);

/// ||W Phi W^{-1}||_2 for the Pade factor Phi at step tau.
double weighted_pade_norm(const DiscreteOperator& op, const Grid1D& g, double tau, Weight w);

struct ProductNormCheck {
    double exp_norm = 0.0;        // ||prod exp(tau_k M)||_2
    double pade_norm = 0.0;       // ||prod Phi(tau_k)||_2
    double bound_sigma = 0.0;     // sqrt(sigma_max / sigma_min)
    double bound_weighted = 0.0;  // max w / min w with the Grid weights
    bool pass = false;            // both norms <= bound_weighted (1 + 1e-10)
};

ProductNormCheck product_norm_bound_check(const DiscreteOperator& op, const Grid1D& g,
                                          std::span<const double> taus);

struct ProbeConfig {
    Problem1D problem;
    StepConfig step;
    double t_final = 0.3;
    double delta = 1e-6;     // max-norm size of the initial perturbation
    bool frozen = true;      // hold g at g(u0) in both runs
    std::uint64_t seed = 1;  // perturbation shape
};

struct StabilityProbeResult {
    double amplification = 0.0;  // ||z_final||_2 / ||z_0||_2
    long steps = 0;
    double t_final = 0.0;
    bool frozen_source = true;
    double growth = 0.0;          // G: max |dg/dv| along the base run (0 when frozen)
    double bound = 0.0;           // exp(G t) sqrt(sigma_max / sigma_min)
    double bound_weighted = 0.0;  // exp(G t) max w / min w
};

/// Paired base/perturbed runs sharing one step sequence. In nonlinear mode a
/// base run that quenches before t_final raises Error(ProbeWindow).
StabilityProbeResult stability_probe(const ProbeConfig& cfg);

/// `mode,delta,t_final,amplification,bound`
void write_probe_csv(std::ostream& os, const StabilityProbeResult& r, double delta);

/// Linear test problem v' = M v + g0 with constant g0, stepped by the
/// production Crank-Nicolson propagator and compared with
/// E(T M) v0 + M^{-1} (E(T M) - I) g0.
struct LinearOrderConfig {
    DiscreteOperator op;
    std::vector<double> v0;
    std::vector<double> g0;  // empty means pure diffusion
    double t_end = 0.1;
    double tau0 = 0.01;
};

struct OrderEstimate {
    std::vector<double> errors;  // at tau0, tau0/2, tau0/4
    std::vector<double> ratios;
    double estimated_order = 0.0;
    bool degenerate = false;  // errors already at roundoff; ratios meaningless
};

OrderEstimate temporal_order_estimate(const LinearOrderConfig& cfg);

/// F(xi) = int_0^xi exp(t^2 - xi^2) dt
double kappa_integral(double xi);
/// max over xi in (0, 5] of F(xi); the critical half-width is kappa * sqrt(2).
double kappa_constant();

struct ScanRow {
    double a = 0.0;
    bool quenched = false;
    double t_quench = 0.0;
    std::optional<ErrorCode> error;
};

/// One run per a (rows in parallel). `base.a` is ignored.
std::vector<ScanRow> critical_domain_scan(std::span<const double> a_values, const Problem1D& base,
                                          const StepConfig& cfg, double t_end);

/// `a,quenched,t_quench`; failed rows carry quenched=false and t_quench=nan.
void write_scan_csv(std::ostream& os, std::span<const ScanRow> rows);

}  // namespace kawarada
