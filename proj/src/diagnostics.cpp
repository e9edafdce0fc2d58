#include "kawarada/diagnostics.hpp"

#include <fmt/format.h>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

namespace kawarada {

namespace {

void require_square(const DenseMatrix& a, const char* what) {
    if (a.rows() != a.cols()) {
        throw Error(ErrorCode::InvalidArgument,
                    fmt::format("{}: matrix is {}x{}, not square", what, a.rows(), a.cols()));
    }
    if (a.rows() > dense_cap) {
        throw Error(ErrorCode::InvalidArgument,
                    fmt::format("{}: N = {} exceeds the dense cap {}", what, a.rows(), dense_cap));
    }
}

Eigen::VectorXd as_eigen(std::span<const double> v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

DenseMatrix to_dense(const Tridiagonal& t) {
    const auto n = static_cast<Eigen::Index>(t.size());
    DenseMatrix out = DenseMatrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        out(i, i) = t.diag[i];
        if (i + 1 < n) {
            out(i, i + 1) = t.sup[i];
            out(i + 1, i) = t.sub[i];
        }
    }
    return out;
}

DenseMatrix dense_M(const DiscreteOperator& op) { return to_dense(op.m); }

double logarithmic_norm(const DenseMatrix& a) {
    require_square(a, "logarithmic_norm");
    const DenseMatrix sym = 0.5 * (a + a.transpose());
    Eigen::SelfAdjointEigenSolver<DenseMatrix> es(sym, Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff();
}

DenseMatrix matrix_exp_oracle(const DenseMatrix& a, double t) {
    require_square(a, "matrix_exp_oracle");
    if (!std::isfinite(t)) throw Error(ErrorCode::InvalidArgument, "matrix_exp_oracle: t not finite");
    const Eigen::Index n = a.rows();
    DenseMatrix x = t * a;
    const double norm = x.cwiseAbs().colwise().sum().maxCoeff();
    if (!std::isfinite(norm)) throw Error(ErrorCode::Range, "matrix_exp_oracle: t*A not finite");

    int squarings = 0;
    if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
    x /= std::ldexp(1.0, squarings);

    // ||x||_1 <= 1/2, so 24 terms leave a remainder far below 1e-16.
    DenseMatrix result = DenseMatrix::Identity(n, n);
    DenseMatrix term = DenseMatrix::Identity(n, n);
    for (int k = 1; k <= 24; ++k) {
        term = term * x / static_cast<double>(k);
        result += term;
    }
    for (int s = 0; s < squarings; ++s) {
        result = result * result;
        if (!result.allFinite()) {
            throw Error(ErrorCode::Range, fmt::format("matrix_exp_oracle overflow, ||tA||_1 = {}", norm));
        }
    }
    return result;
}

DenseMatrix pade_factor(const DenseMatrix& m, double tau) {
    require_square(m, "pade_factor");
    const Eigen::Index n = m.rows();
    const DenseMatrix id = DenseMatrix::Identity(n, n);
    return (id - 0.5 * tau * m).partialPivLu().solve(id + 0.5 * tau * m);
}

double pade_local_error(const DenseMatrix& m, double tau) {
    return spectral_norm(matrix_exp_oracle(m, tau) - pade_factor(m, tau));
}

double spectral_norm(const DenseMatrix& a) {
    if (a.size() == 0) return 0.0;
    Eigen::JacobiSVD<DenseMatrix> svd(a);
    return svd.singularValues()(0);
}

std::vector<std::complex<double>> dense_eigenvalues(const DenseMatrix& a) {
    require_square(a, "dense_eigenvalues");
    Eigen::EigenSolver<DenseMatrix> es(a, false);
    const auto& ev = es.eigenvalues();
    return {ev.data(), ev.data() + ev.size()};
}

std::vector<double> similarity_weights(const DiscreteOperator& op, const Grid1D& g, Weight w) {
    std::vector<double> out(op.size());
    if (w == Weight::Sigma) {
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::sqrt(op.sigma[i]);
        return out;
    }
    const SymmetrizedForm sf = symmetrize(op.p, g);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::sqrt(sf.d_diag[i] * op.sigma[i]);
    return out;
}

namespace {

DenseMatrix similarity(const DenseMatrix& a, std::span<const double> w) {
    const Eigen::VectorXd wv = as_eigen(w);
    return wv.asDiagonal() * a * wv.cwiseInverse().asDiagonal();
}

double condition(std::span<const double> w) {
    const auto [lo, hi] = std::minmax_element(w.begin(), w.end());
    return *hi / *lo;
}

}  // namespace

double weighted_pade_norm(const DiscreteOperator& op, const Grid1D& g, double tau, Weight w) {
    const DenseMatrix phi = pade_factor(dense_M(op), tau);
    return spectral_norm(similarity(phi, similarity_weights(op, g, w)));
}

ProductNormCheck product_norm_bound_check(const DiscreteOperator& op, const Grid1D& g,
                                          std::span<const double> taus) {
    const DenseMatrix m = dense_M(op);
    require_square(m, "product_norm_bound_check");
    const Eigen::Index n = m.rows();
    DenseMatrix prod_exp = DenseMatrix::Identity(n, n);
    DenseMatrix prod_pade = DenseMatrix::Identity(n, n);
    for (double tau : taus) {
        prod_exp = matrix_exp_oracle(m, tau) * prod_exp;
        prod_pade = pade_factor(m, tau) * prod_pade;
    }
    ProductNormCheck r;
    r.exp_norm = spectral_norm(prod_exp);
    r.pade_norm = spectral_norm(prod_pade);
    const auto [lo, hi] = std::minmax_element(op.sigma.begin(), op.sigma.end());
    r.bound_sigma = std::sqrt(*hi / *lo);
    r.bound_weighted = condition(similarity_weights(op, g, Weight::Grid));
    const double limit = r.bound_weighted * (1.0 + 1e-10);
    r.pass = r.exp_norm <= limit && r.pade_norm <= limit;
    return r;
}

StabilityProbeResult stability_probe(const ProbeConfig& cfg) {
    if (!(cfg.delta > 0.0)) throw Error(ErrorCode::InvalidArgument, "probe delta must be > 0");
    if (!(cfg.t_final > 0.0)) throw Error(ErrorCode::InvalidArgument, "probe t_final must be > 0");
    cfg.step.validate();
    const Problem1D& pb = cfg.problem;
    pb.model.validate();
    const std::size_t n = pb.grid.n_interior();
    if (pb.model.size() != n) throw Error(ErrorCode::InvalidArgument, "source model size differs from grid");

    const DiscreteOperator op = assemble_M(pb.grid, pb.model.sigma, pb.a);
    Stepper base_stepper(op, pb.model);
    Stepper pert_stepper(op, pb.model);

    std::vector<double> v = pb.u0.empty() ? default_u0(pb.grid) : pb.u0;
    if (v.size() != n) throw Error(ErrorCode::InvalidArgument, "u0 size differs from grid");

    SplitMix64 rng(cfg.seed);
    std::vector<double> z0(n);
    for (auto& z : z0) z = 2.0 * rng.next_unit() - 1.0;
    const double zmax = std::abs(*std::max_element(z0.begin(), z0.end(), [](double x, double y) {
        return std::abs(x) < std::abs(y);
    }));
    for (auto& z : z0) z *= cfg.delta / zmax;
    std::vector<double> vp(n);
    for (std::size_t i = 0; i < n; ++i) vp[i] = v[i] + z0[i];

    std::vector<double> gv(n), gp(n), w(n), next(n), next_p(n);
    std::vector<double> g_frozen = g_eval(v, pb.model);
    auto max_jac = [&](std::span<const double> x) {
        const auto jd = g_jacobian_diag(x, pb.model);
        return *std::max_element(jd.begin(), jd.end());
    };

    StabilityProbeResult r;
    r.frozen_source = cfg.frozen;
    SolverState state;
    state.v = v;
    state.max_v = *std::max_element(v.begin(), v.end());
    state.g_inf = *std::max_element(g_frozen.begin(), g_frozen.end());
    if (!cfg.frozen) r.growth = max_jac(v);

    double t = 0.0;
    const double ceiling = base_stepper.ceiling();
    while (cfg.t_final - t > 1e-14 * std::max(1.0, cfg.t_final)) {
        double tau = std::min(adapt_tau(state, cfg.step, ceiling), cfg.t_final - t);
        if (cfg.frozen) {
            // Both runs see the same frozen source, so only the propagator
            // acts on the difference.
            const double half = 0.5 * tau;
            for (std::size_t i = 0; i < n; ++i) {
                gv[i] = v[i] + half * g_frozen[i];
                gp[i] = vp[i] + half * g_frozen[i];
            }
            base_stepper.propagate(gv, tau, next);
            pert_stepper.propagate(gp, tau, next_p);
            for (std::size_t i = 0; i < n; ++i) {
                next[i] += half * g_frozen[i];
                next_p[i] += half * g_frozen[i];
            }
        } else {
            try {
                g_eval(v, pb.model, gv);
                base_stepper.step(v, gv, tau, w, next);
                r.growth = std::max(r.growth, max_jac(w));
                g_eval(vp, pb.model, gp);
                pert_stepper.step(vp, gp, tau, w, next_p);
            } catch (const QuenchOverflow&) {
                throw Error(ErrorCode::ProbeWindow,
                            fmt::format("base run reaches unity at t = {} before t_final = {}", t,
                                        cfg.t_final));
            }
            if (check_quench(next).quenched) {
                throw Error(ErrorCode::ProbeWindow,
                            fmt::format("base run quenches at t = {} before t_final = {}", t + tau,
                                        cfg.t_final));
            }
            r.growth = std::max(r.growth, max_jac(next));
        }
        v.swap(next);
        vp.swap(next_p);
        t += tau;
        ++r.steps;
        state.max_v = *std::max_element(v.begin(), v.end());
        state.triggered = state.triggered || state.max_v >= cfg.step.trigger_level;
        if (!cfg.frozen) {
            g_eval(v, pb.model, gv);
            state.g_inf = *std::max_element(gv.begin(), gv.end());
        }
    }

    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = vp[i] - v[i];
        num += d * d;
        den += z0[i] * z0[i];
    }
    r.amplification = std::sqrt(num / den);
    r.t_final = t;
    const auto [lo, hi] = std::minmax_element(pb.model.sigma.begin(), pb.model.sigma.end());
    const double growth = std::exp(r.growth * t);
    r.bound = growth * std::sqrt(*hi / *lo);
    r.bound_weighted = growth * condition(similarity_weights(op, pb.grid, Weight::Grid));
    return r;
}

void write_probe_csv(std::ostream& os, const StabilityProbeResult& r, double delta) {
    os << "mode,delta,t_final,amplification,bound\n";
    os << fmt::format("{},{},{},{},{}\n", r.frozen_source ? "frozen" : "nonlinear", delta, r.t_final,
                      r.amplification, r.bound);
}

OrderEstimate temporal_order_estimate(const LinearOrderConfig& cfg) {
    const DiscreteOperator& op = cfg.op;
    const std::size_t n = op.size();
    if (cfg.v0.size() != n) throw Error(ErrorCode::InvalidArgument, "v0 size differs from operator");
    if (!cfg.g0.empty() && cfg.g0.size() != n) {
        throw Error(ErrorCode::InvalidArgument, "g0 size differs from operator");
    }
    if (!(cfg.tau0 > 0.0) || !(cfg.t_end > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "order estimate needs tau0 > 0 and t_end > 0");
    }

    const DenseMatrix m = dense_M(op);
    const DenseMatrix e = matrix_exp_oracle(m, cfg.t_end);
    Eigen::VectorXd ref = e * as_eigen(cfg.v0);
    if (!cfg.g0.empty()) {
        const Eigen::Index dim = m.rows();
        ref += m.partialPivLu().solve((e - DenseMatrix::Identity(dim, dim)) * as_eigen(cfg.g0));
    }

    // The production step with a constant source reduces to
    // v <- Phi (v + tau/2 g0) + tau/2 g0.
    SourceModel dummy = make_source(op.sigma);
    Stepper stepper(op, dummy);
    OrderEstimate out;
    std::vector<double> y(n), v(n);
    for (int level = 0; level < 3; ++level) {
        const double tau_nominal = cfg.tau0 / std::ldexp(1.0, level);
        const long steps = std::max(1L, std::lround(cfg.t_end / tau_nominal));
        const double tau = cfg.t_end / static_cast<double>(steps);
        v = cfg.v0;
        for (long s = 0; s < steps; ++s) {
            for (std::size_t i = 0; i < n; ++i) y[i] = v[i] + (cfg.g0.empty() ? 0.0 : 0.5 * tau * cfg.g0[i]);
            stepper.propagate(y, tau, v);
            if (!cfg.g0.empty()) {
                for (std::size_t i = 0; i < n; ++i) v[i] += 0.5 * tau * cfg.g0[i];
            }
        }
        out.errors.push_back((as_eigen(v) - ref).norm());
    }

    const double floor = 1e3 * std::numeric_limits<double>::epsilon() * std::max(ref.norm(), 1e-300);
    for (std::size_t k = 0; k + 1 < out.errors.size(); ++k) {
        out.ratios.push_back(out.errors[k] / out.errors[k + 1]);
    }
    out.degenerate = out.errors.front() <= floor;
    double mean = 0.0;
    for (double q : out.ratios) mean += q;
    mean /= static_cast<double>(out.ratios.size());
    out.estimated_order = std::log2(mean);
    return out;
}

namespace {

// Adaptive Simpson with a Richardson correction.
template <class F>
double simpson_step(const F& f, double a, double b, double fa, double fm, double fb, double whole,
                    double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

template <class F>
double adaptive_simpson(const F& f, double a, double b, double tol) {
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_step(f, a, b, fa, fm, fb, whole, tol, 48);
}

}  // namespace

double kappa_integral(double xi) {
    if (!(xi > 0.0)) return 0.0;
    // exp(t^2 - xi^2) written as exp((t - xi)(t + xi)) avoids cancellation.
    auto f = [xi](double t) { return std::exp((t - xi) * (t + xi)); };
    return adaptive_simpson(f, 0.0, xi, 1e-14);
}

double kappa_constant() {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = 1e-6;
    double hi = 5.0;
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double f1 = kappa_integral(x1);
    double f2 = kappa_integral(x2);
    while (hi - lo > 1e-10) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = kappa_integral(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = kappa_integral(x1);
        }
    }
    return kappa_integral(0.5 * (lo + hi));
}

std::vector<ScanRow> critical_domain_scan(std::span<const double> a_values, const Problem1D& base,
                                          const StepConfig& cfg, double t_end) {
    for (std::size_t i = 0; i < a_values.size(); ++i) {
        if (!(a_values[i] > 0.0)) {
            throw Error(ErrorCode::InvalidArgument, fmt::format("a[{}] = {} is not positive", i, a_values[i]));
        }
        if (i > 0 && a_values[i] < a_values[i - 1]) {
            throw Error(ErrorCode::InvalidArgument, "a values must be sorted");
        }
    }
    std::vector<ScanRow> rows(a_values.size());
    RunOptions opt;
    opt.keep_snapshots = false;
    opt.scalar_stride = std::numeric_limits<long>::max();
    const auto count = static_cast<long>(a_values.size());
#pragma omp parallel for schedule(dynamic)
    for (long k = 0; k < count; ++k) {
        ScanRow& row = rows[k];
        row.a = a_values[k];
        try {
            Problem1D pb = base;
            pb.a = row.a;
            const RunResult r = run_1d(pb, cfg, t_end, opt);
            row.quenched = r.report.quenched;
            row.t_quench = r.report.t_quench;
        } catch (const Error& e) {
            row.error = e.code();
        } catch (const std::exception&) {
            row.error = ErrorCode::NumericalFailure;
        }
    }
    return rows;
}

void write_scan_csv(std::ostream& os, std::span<const ScanRow> rows) {
    os << "a,quenched,t_quench\n";
    for (const auto& r : rows) {
        if (r.error) {
            os << fmt::format("{},false,nan\n", r.a);
        } else {
            os << fmt::format("{},{},{}\n", r.a, r.quenched, r.t_quench);
        }
    }
}

}  // namespace kawarada
