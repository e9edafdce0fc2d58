#pragma once

#include "kawarada/difference_operator.hpp"
#include "kawarada/grid.hpp"
#include "kawarada/source.hpp"

#include <span>
#include <vector>

namespace kawarada {

/// Time-step control. Before the trigger level is reached the step is
/// min(tau_base, safety * ceiling); afterwards it shrinks inversely with the
/// source magnitude down to the floor tau_min = tau_min_c * 1e-6.
struct StepConfig {
    double tau_base = 0.0;       // <= 0 selects safety * ceiling
    double tau_min_c = 1.0;
    double trigger_level = 0.90;
    double safety = 0.9;

    double tau_min() const noexcept { return tau_min_c * 1e-6; }
    void validate() const;
};

struct AuditFlags {
    bool positive = true;
    bool monotone = true;
    bool cfl_ok = true;
};

/// State of a running 1-D or 2-D integration.
struct SolverState {
    std::vector<double> v;
    double t = 0.0;
    long ell = 0;
    double tau_last = 0.0;
    bool triggered = false;
    double max_v = 0.0;
    double g_inf = 0.0;  // ||g(v)||_inf at the current state
    AuditFlags audits;
};

struct StepResult {
    std::vector<double> v_next;
    std::vector<double> w_pred;
    double tau_used = 0.0;
    double cfl_ceiling = 0.0;
};

/// min(a^2 h_min^2 / (2 ||B||_2), 1)
double cfl_ceiling(double a, double h_min, double b_norm);
double cfl_ceiling(const DiscreteOperator& op, const Grid1D& g);
double cfl_ceiling(const DiscreteOperator& op);

/// w = v + tau (M v + g(v))
std::vector<double> predictor(std::span<const double> v, double tau, const DiscreteOperator& op,
                              const SourceModel& model);

/// One semi-adaptive Crank-Nicolson step
///   v_next = (I - tau/2 M)^{-1} (I + tau/2 M) (v + tau/2 g(v)) + tau/2 g(w)
/// with w the explicit predictor. Throws CflViolation when tau >= ceiling and
/// QuenchOverflow when v or w reaches unity.
StepResult cn_step(std::span<const double> v, double tau, const DiscreteOperator& op,
                   const SourceModel& model);

double adapt_tau(const SolverState& state, const StepConfig& cfg, double ceiling);

/// Reusable stepping engine; owns scratch so the time loop never allocates.
class Stepper {
public:
    Stepper(const DiscreteOperator& op, const SourceModel& model);

    double ceiling() const noexcept { return ceiling_; }
    const DiscreteOperator& op() const noexcept { return op_; }
    const SourceModel& model() const noexcept { return model_; }

    /// Predictor into `w` given g(v) in `gv`.
    void predict(std::span<const double> v, std::span<const double> gv, double tau,
                 std::span<double> w);

    /// Full step given g(v). `w` receives the predictor. Throws QuenchOverflow
    /// if the predictor reaches unity; `w` is valid in that case.
    void step(std::span<const double> v, std::span<const double> gv, double tau,
              std::span<double> w, std::span<double> v_next);

    /// Linear core: out = (I - tau/2 M)^{-1} (I + tau/2 M) y.
    void propagate(std::span<const double> y, double tau, std::span<double> out);

private:
    const DiscreteOperator& op_;
    const SourceModel& model_;
    double ceiling_;
    std::vector<double> mv_, y_, rhs_, gw_, scratch_;
    Tridiagonal implicit_;
};

}  // namespace kawarada
