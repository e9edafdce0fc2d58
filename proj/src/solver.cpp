#include "kawarada/solver.hpp"

#include "drive.hpp"
#include "kawarada/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

namespace kawarada {

std::vector<double> default_u0(const Grid1D& g) {
    std::vector<double> u0;
    u0.reserve(g.n_interior());
    for (double x : g.interior()) u0.push_back(0.001 * (1.0 - std::cos(2.0 * std::numbers::pi * x)));
    return u0;
}

QuenchStatus check_quench(std::span<const double> v) {
    QuenchStatus s;
    if (v.empty()) return s;
    s.index = static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
    s.quenched = v[s.index] >= 1.0;
    return s;
}

namespace {

bool at_floor(double tau, double scale_c) { return tau == scale_c * 1e-6; }

}  // namespace

std::vector<double> estimate_ut(std::span<const double> v_prev, std::span<const double> v_next,
                                double tau, double scale_c) {
    if (!(tau > 0.0)) throw Error(ErrorCode::InvalidArgument, "estimate_ut needs tau > 0");
    std::vector<double> ut(v_prev.size());
    const bool floor = at_floor(tau, scale_c);
    for (std::size_t i = 0; i < ut.size(); ++i) {
        const double diff = v_next[i] - v_prev[i];
        ut[i] = floor ? (diff / scale_c) * 1e6 : diff / tau;
    }
    return ut;
}

double max_ut(std::span<const double> v_prev, std::span<const double> v_next, double tau,
              double scale_c) {
    if (!(tau > 0.0)) throw Error(ErrorCode::InvalidArgument, "estimate_ut needs tau > 0");
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < v_prev.size(); ++i) best = std::max(best, v_next[i] - v_prev[i]);
    return at_floor(tau, scale_c) ? (best / scale_c) * 1e6 : best / tau;
}

namespace {

class Engine1D {
public:
    Engine1D(const DiscreteOperator& op, const SourceModel& model)
        : op_(op), model_(model), stepper_(op, model) {}

    double ceiling() const { return stepper_.ceiling(); }
    double source(std::span<const double> v, std::span<double> gv) {
        return g_eval(v, model_, gv);
    }
    void rhs(std::span<const double> v, std::span<const double> gv, std::span<double> out) {
        op_.m.apply(v, out);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += gv[i];
    }
    void step(std::span<const double> v, std::span<const double> gv, double tau,
              std::span<double> w, std::span<double> v_next) {
        stepper_.step(v, gv, tau, w, v_next);
    }

private:
    const DiscreteOperator& op_;
    const SourceModel& model_;
    Stepper stepper_;
};

}  // namespace

RunResult run_1d(const Problem1D& problem, const StepConfig& cfg, double t_end,
                 const RunOptions& options) {
    cfg.validate();
    problem.model.validate();
    const Grid1D& grid = problem.grid;
    const std::size_t n = grid.n_interior();
    if (problem.model.size() != n) {
        throw Error(ErrorCode::InvalidArgument, "source model size differs from grid");
    }
    std::vector<double> v0 = problem.u0.empty() ? default_u0(grid) : problem.u0;
    if (v0.size() != n) throw Error(ErrorCode::InvalidArgument, "u0 size differs from grid");

    const DiscreteOperator op = assemble_M(grid, problem.model.sigma, problem.a);
    Engine1D engine(op, problem.model);
    RunResult out = detail::drive(engine, std::move(v0), cfg, t_end, options);
    out.report.x_quench = grid.x(check_quench(out.state.v).index + 1);
    return out;
}

void write_history_csv(std::ostream& os, const RunHistory& h) {
    os << "t,max_u,max_ut\n";
    for (std::size_t i = 0; i < h.times.size(); ++i) {
        os << fmt::format("{},{},{}\n", h.times[i], h.max_u[i], h.max_ut[i]);
    }
}

void write_snapshots_csv(std::ostream& os, const RunHistory& h, const Grid1D& g) {
    os << "t,x,u\n";
    const auto x = g.nodes();
    for (const auto& s : h.snapshots) {
        os << fmt::format("{},{},{}\n", s.t, x.front(), 0.0);
        for (std::size_t i = 0; i < s.v.size(); ++i) {
            os << fmt::format("{},{},{}\n", s.t, x[i + 1], s.v[i]);
        }
        os << fmt::format("{},{},{}\n", s.t, x.back(), 0.0);
    }
}

void write_report_csv(std::ostream& os, const QuenchReport& r) {
    if (r.y_quench) {
        os << "quenched,t_quench,x_quench,y_quench,max_ut,steps\n";
        os << fmt::format("{},{},{},{},{},{}\n", r.quenched, r.t_quench, r.x_quench, *r.y_quench,
                          r.max_ut, r.steps_total);
    } else {
        os << "quenched,t_quench,x_quench,max_ut,steps\n";
        os << fmt::format("{},{},{},{},{}\n", r.quenched, r.t_quench, r.x_quench, r.max_ut,
                          r.steps_total);
    }
}

}  // namespace kawarada
