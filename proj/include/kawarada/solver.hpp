#pragma once

#include "kawarada/grid.hpp"
#include "kawarada/source.hpp"
#include "kawarada/stepper.hpp"

#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace kawarada {

/// sigma(x) u_t = (1/a^2) u_xx + phi f(u) on (-1, 1), u = 0 on the boundary.
struct Problem1D {
    Grid1D grid;
    SourceModel model;
    double a = 1.0;
    std::vector<double> u0;  // interior values; empty selects default_u0(grid)
};

/// 0.001 (1 - cos(2 pi x)) at the interior nodes.
std::vector<double> default_u0(const Grid1D& g);

struct QuenchReport {
    bool quenched = false;
    double t_quench = 0.0;  // final time when not quenched
    double x_quench = 0.0;  // node of the maximal component at the final step
    std::optional<double> y_quench;
    double max_ut = 0.0;
    long steps_total = 0;
};

struct Snapshot {
    double t = 0.0;
    std::vector<double> v;
};

struct RunHistory {
    std::vector<double> times;
    std::vector<double> max_u;
    std::vector<double> max_ut;
    std::vector<Snapshot> snapshots;  // geometric in time, plus the final tail
};

struct AuditSummary {
    long monotone_violations = 0;
    long positivity_violations = 0;
    long cfl_violations = 0;
    long bound_violations = 0;  // max v >= 1 before the reported quench step
    double worst_decrease = 0.0;

    bool clean() const noexcept {
        return monotone_violations == 0 && positivity_violations == 0 && cfl_violations == 0 &&
               bound_violations == 0;
    }
};

struct RunOptions {
    double t0 = 0.0;
    long scalar_stride = 1;       // record every k-th step in the scalar history
    int geometric_snapshots = 24; // snapshot times t_first * r^k up to t_end
    double first_snapshot = 1e-3;
    std::size_t tail_steps = 105; // full states kept for the last steps before the end
    double monotone_tol = 1e-13;
    bool keep_snapshots = true;
};

struct RunResult {
    QuenchReport report;
    RunHistory history;
    AuditSummary audits;
    SolverState state;  // final state
    std::vector<double> taus;  // accepted step sizes, in order
};

struct QuenchStatus {
    bool quenched = false;
    std::size_t index = 0;  // argmax, ties resolved to the smallest index
};

QuenchStatus check_quench(std::span<const double> v);

/// Componentwise difference quotient. At the floor tau == c * 1e-6 the
/// quotient is formed as (diff / c) * 1e6.
std::vector<double> estimate_ut(std::span<const double> v_prev, std::span<const double> v_next,
                                double tau, double scale_c);

/// Max of estimate_ut without materializing the vector.
double max_ut(std::span<const double> v_prev, std::span<const double> v_next, double tau,
              double scale_c);

RunResult run_1d(const Problem1D& problem, const StepConfig& cfg, double t_end,
                 const RunOptions& options = {});

/// `t,max_u,max_ut`
void write_history_csv(std::ostream& os, const RunHistory& h);
/// `t,x,u` over all snapshots, boundary nodes included.
void write_snapshots_csv(std::ostream& os, const RunHistory& h, const Grid1D& g);
/// `quenched,t_quench,x_quench[,y_quench],max_ut,steps`
void write_report_csv(std::ostream& os, const QuenchReport& r);

}  // namespace kawarada
