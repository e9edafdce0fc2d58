#include "kawarada/lod.hpp"

#include "drive.hpp"
#include "kawarada/difference_operator.hpp"
#include "kawarada/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace kawarada {

std::vector<double> default_u0_2d(const Grid2D& g) {
    std::vector<double> u0;
    u0.reserve(g.size());
    const double two_pi = 2.0 * std::numbers::pi;
    for (double y : g.gy.interior()) {
        for (double x : g.gx.interior()) {
            u0.push_back(0.001 * (1.0 - std::cos(two_pi * x)) * (1.0 - std::cos(two_pi * y)));
        }
    }
    return u0;
}

LodOperator make_lod_operator(const Grid2D& g, std::span<const double> sigma, double a, double b) {
    if (sigma.size() != g.size()) {
        throw Error(ErrorCode::InvalidArgument, "sigma size differs from the 2-D grid");
    }
    if (!(a > 0.0) || !(b > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "domain half-widths must be > 0");
    }
    LodOperator op;
    op.px = assemble_P(g.gx);
    op.py = assemble_P(g.gy);
    op.nx = g.nx();
    op.ny = g.ny();
    op.inv_a2 = 1.0 / (a * a);
    op.inv_b2 = 1.0 / (b * b);
    op.inv_sigma.resize(sigma.size());
    for (std::size_t k = 0; k < sigma.size(); ++k) {
        if (!(sigma[k] > 0.0)) {
            throw Error(ErrorCode::DegenerateInterior,
                        fmt::format("sigma[{}] = {} is not positive", k, sigma[k]));
        }
        op.inv_sigma[k] = 1.0 / sigma[k];
    }
    const double b_norm = *std::max_element(op.inv_sigma.begin(), op.inv_sigma.end());
    const double hx = grid_extremal_steps(g.gx).first;
    const double hy = grid_extremal_steps(g.gy).first;
    op.ceiling = std::min(cfl_ceiling(a, hx, b_norm), cfl_ceiling(b, hy, b_norm));
    return op;
}

void LodOperator::apply_m(std::span<const double> v, std::span<double> out) const {
    for (std::size_t j = 0; j < ny; ++j) {
        for (std::size_t i = 0; i < nx; ++i) {
            const std::size_t k = j * nx + i;
            double dxx = px.diag[i] * v[k];
            if (i > 0) dxx += px.sub[i - 1] * v[k - 1];
            if (i + 1 < nx) dxx += px.sup[i] * v[k + 1];
            double dyy = py.diag[j] * v[k];
            if (j > 0) dyy += py.sub[j - 1] * v[k - nx];
            if (j + 1 < ny) dyy += py.sup[j] * v[k + nx];
            out[k] = inv_sigma[k] * (inv_a2 * dxx + inv_b2 * dyy);
        }
    }
}

namespace {

struct LineScratch {
    std::vector<double> y, rhs, z, c, coef;
    explicit LineScratch(std::size_t n) : y(n), rhs(n), z(n), c(n), coef(n) {}
};

// z = (I - tau/2 C P)^{-1} (I + tau/2 C P) y with C = diag(coef).
void line_cn(const Tridiagonal& p, double tau, LineScratch& s) {
    const std::size_t n = p.size();
    const double half = 0.5 * tau;
    const auto& y = s.y;
    for (std::size_t k = 0; k < n; ++k) {
        double py = p.diag[k] * y[k];
        if (k > 0) py += p.sub[k - 1] * y[k - 1];
        if (k + 1 < n) py += p.sup[k] * y[k + 1];
        s.rhs[k] = y[k] + half * s.coef[k] * py;
    }
    // Thomas elimination on I - half * C P, built on the fly.
    double pivot = 1.0 - half * s.coef[0] * p.diag[0];
    s.z[0] = s.rhs[0] / pivot;
    for (std::size_t k = 1; k < n; ++k) {
        const double upper = -half * s.coef[k - 1] * p.sup[k - 1];
        const double lower = -half * s.coef[k] * p.sub[k - 1];
        s.c[k - 1] = upper / pivot;
        pivot = (1.0 - half * s.coef[k] * p.diag[k]) - lower * s.c[k - 1];
        s.z[k] = (s.rhs[k] - lower * s.z[k - 1]) / pivot;
    }
    for (std::size_t k = n - 1; k-- > 0;) s.z[k] -= s.c[k] * s.z[k + 1];
}

struct SweepGeometry {
    const Tridiagonal* p;
    double inv_d2;
    std::size_t lines;
    std::size_t length;
    std::size_t line_stride;
    std::size_t elem_stride;
};

SweepGeometry geometry(const LodOperator& op, Axis axis) {
    if (axis == Axis::X) return {&op.px, op.inv_a2, op.ny, op.nx, op.nx, 1};
    return {&op.py, op.inv_b2, op.nx, op.ny, 1, op.nx};
}

void sweep_line(const LodOperator& op, const SweepGeometry& geo, std::size_t line, double tau,
                std::span<const double> in, std::span<const double> pre,
                std::span<const double> post, std::span<double> out, LineScratch& s) {
    const std::size_t base = line * geo.line_stride;
    for (std::size_t k = 0; k < geo.length; ++k) {
        const std::size_t idx = base + k * geo.elem_stride;
        s.y[k] = in[idx] + pre[idx];
        s.coef[k] = geo.inv_d2 * op.inv_sigma[idx];
    }
    line_cn(*geo.p, tau, s);
    for (std::size_t k = 0; k < geo.length; ++k) {
        const std::size_t idx = base + k * geo.elem_stride;
        out[idx] = s.z[k] + post[idx];
    }
}

}  // namespace

void lod_sweep_serial(const LodOperator& op, Axis axis, double tau, std::span<const double> in,
                      std::span<const double> pre, std::span<const double> post,
                      std::span<double> out) {
    const SweepGeometry geo = geometry(op, axis);
    LineScratch s(geo.length);
    for (std::size_t line = 0; line < geo.lines; ++line) {
        sweep_line(op, geo, line, tau, in, pre, post, out, s);
    }
}

void lod_sweep_omp(const LodOperator& op, Axis axis, double tau, std::span<const double> in,
                   std::span<const double> pre, std::span<const double> post,
                   std::span<double> out) {
    const SweepGeometry geo = geometry(op, axis);
    const auto lines = static_cast<long>(geo.lines);
#pragma omp parallel
    {
        LineScratch s(geo.length);
#pragma omp for schedule(static)
        for (long line = 0; line < lines; ++line) {
            sweep_line(op, geo, static_cast<std::size_t>(line), tau, in, pre, post, out, s);
        }
    }
}

double g_eval_serial(std::span<const double> v, const SourceModel& model, std::span<double> out) {
    return g_eval(v, model, out);
}

double g_eval_omp(std::span<const double> v, const SourceModel& model, std::span<double> out) {
    const auto n = static_cast<long>(v.size());
    const double theta = model.theta;
    long first_bad = n;
    double norm = 0.0;
#pragma omp parallel for schedule(static) reduction(max : norm) reduction(min : first_bad)
    for (long i = 0; i < n; ++i) {
        if (!(v[i] < 1.0)) {
            first_bad = std::min(first_bad, i);
            continue;
        }
        const double f = theta == 1.0 ? 1.0 / (1.0 - v[i]) : std::pow(1.0 - v[i], -theta);
        out[i] = model.phi[i] * f / model.sigma[i];
        norm = std::max(norm, out[i]);
    }
    if (first_bad < n) throw QuenchOverflow(static_cast<std::size_t>(first_bad), v[first_bad]);
    return norm;
}

namespace {

class Engine2D {
public:
    Engine2D(const LodOperator& op, const SourceModel& model, Kernel kernel)
        : op_(op), model_(model), kernel_(kernel), mv_(op.nx * op.ny), gw_(mv_.size()),
          pre_(mv_.size()), post_(mv_.size()), mid_(mv_.size()) {}

    double ceiling() const { return op_.ceiling; }

    double source(std::span<const double> v, std::span<double> gv) {
        return kernel_ == Kernel::OpenMP ? g_eval_omp(v, model_, gv)
                                         : g_eval_serial(v, model_, gv);
    }

    void rhs(std::span<const double> v, std::span<const double> gv, std::span<double> out) {
        op_.apply_m(v, out);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += gv[i];
    }

    void step(std::span<const double> v, std::span<const double> gv, double tau,
              std::span<double> w, std::span<double> v_next) {
        op_.apply_m(v, mv_);
        for (std::size_t i = 0; i < v.size(); ++i) w[i] = v[i] + tau * (mv_[i] + gv[i]);
        source(w, gw_);

        const double quarter = 0.25 * tau;
        for (std::size_t i = 0; i < v.size(); ++i) {
            pre_[i] = quarter * gv[i];
            post_[i] = quarter * gw_[i];
        }
        auto sweep = kernel_ == Kernel::OpenMP ? lod_sweep_omp : lod_sweep_serial;
        sweep(op_, Axis::X, tau, v, pre_, post_, mid_);
        sweep(op_, Axis::Y, tau, mid_, pre_, post_, v_next);
    }

private:
    const LodOperator& op_;
    const SourceModel& model_;
    Kernel kernel_;
    std::vector<double> mv_, gw_, pre_, post_, mid_;
};

}  // namespace

RunResult run_2d_lod(const Problem2D& problem, const StepConfig& cfg, double t_end,
                     const RunOptions& options, Kernel kernel) {
    cfg.validate();
    problem.model.validate();
    const Grid2D& g = problem.grid;
    if (problem.model.size() != g.size()) {
        throw Error(ErrorCode::InvalidArgument, "source model size differs from the 2-D grid");
    }
    std::vector<double> v0 = problem.u0.empty() ? default_u0_2d(g) : problem.u0;
    if (v0.size() != g.size()) throw Error(ErrorCode::InvalidArgument, "u0 size differs from grid");

    const LodOperator op = make_lod_operator(g, problem.model.sigma, problem.a, problem.b);
    Engine2D engine(op, problem.model, kernel);
    RunResult out = detail::drive(engine, std::move(v0), cfg, t_end, options);

    const std::size_t k = check_quench(out.state.v).index;
    out.report.x_quench = g.gx.x(k % g.nx() + 1);
    out.report.y_quench = g.gy.x(k / g.nx() + 1);
    return out;
}

void write_snapshots_csv_2d(std::ostream& os, const RunHistory& h, const Grid2D& g) {
    os << "t,x,y,u\n";
    for (const auto& s : h.snapshots) {
        for (std::size_t j = 0; j < g.ny(); ++j) {
            for (std::size_t i = 0; i < g.nx(); ++i) {
                os << fmt::format("{},{},{},{}\n", s.t, g.gx.x(i + 1), g.gy.x(j + 1),
                                  s.v[j * g.nx() + i]);
            }
        }
    }
}

}  // namespace kawarada
