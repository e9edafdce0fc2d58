#include "kawarada/stepper.hpp"

#include "kawarada/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace kawarada {

void StepConfig::validate() const {
    if (!(tau_min_c > 0.0)) throw Error(ErrorCode::InvalidArgument, "tau_min_c must be > 0");
    if (!(trigger_level > 0.0 && trigger_level < 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "trigger level must lie in (0, 1)");
    }
    if (!(safety > 0.0 && safety <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "safety factor must lie in (0, 1]");
    }
    if (tau_base > 0.0 && tau_base < tau_min()) {
        throw Error(ErrorCode::InvalidArgument, "tau_base must be >= tau_min");
    }
}

double cfl_ceiling(double a, double h_min, double b_norm) {
    return std::min(a * a * h_min * h_min / (2.0 * b_norm), 1.0);
}

double cfl_ceiling(const DiscreteOperator& op, const Grid1D& g) {
    return std::min(op.a * op.a * beta_min(g, op.sigma), 1.0);
}

double cfl_ceiling(const DiscreteOperator& op) {
    return cfl_ceiling(op.a, op.h_min, op.b_norm());
}

std::vector<double> predictor(std::span<const double> v, double tau, const DiscreteOperator& op,
                              const SourceModel& model) {
    std::vector<double> gv = g_eval(v, model);
    std::vector<double> w(v.size());
    Stepper(op, model).predict(v, gv, tau, w);
    return w;
}

StepResult cn_step(std::span<const double> v, double tau, const DiscreteOperator& op,
                   const SourceModel& model) {
    Stepper stepper(op, model);
    StepResult r;
    r.cfl_ceiling = stepper.ceiling();
    if (!(tau < r.cfl_ceiling)) {
        throw Error(ErrorCode::CflViolation,
                    fmt::format("tau = {} violates the CFL ceiling {}", tau, r.cfl_ceiling));
    }
    std::vector<double> gv = g_eval(v, model);
    r.v_next.resize(v.size());
    r.w_pred.resize(v.size());
    stepper.step(v, gv, tau, r.w_pred, r.v_next);
    r.tau_used = tau;
    return r;
}

double adapt_tau(const SolverState& state, const StepConfig& cfg, double ceiling) {
    // The CFL bound is strict, so safety == 1 still stays one ulp below it.
    const double cap = std::min(cfg.safety * ceiling, std::nextafter(ceiling, 0.0));
    if (!state.triggered && state.max_v < cfg.trigger_level) {
        return cfg.tau_base > 0.0 ? std::min(cfg.tau_base, cap) : cap;
    }
    const double tau = cap / (1.0 + state.g_inf);
    return std::min(std::max(tau, cfg.tau_min()), cap);
}

Stepper::Stepper(const DiscreteOperator& op, const SourceModel& model)
    : op_(op), model_(model), ceiling_(cfl_ceiling(op)) {
    const std::size_t n = op.size();
    if (model.size() != n) {
        throw Error(ErrorCode::InvalidArgument, "source model and operator sizes differ");
    }
    mv_.resize(n);
    y_.resize(n);
    rhs_.resize(n);
    gw_.resize(n);
    scratch_.resize(n);
    implicit_ = Tridiagonal(n);
}

void Stepper::predict(std::span<const double> v, std::span<const double> gv, double tau,
                      std::span<double> w) {
    op_.m.apply(v, mv_);
    for (std::size_t i = 0; i < v.size(); ++i) w[i] = v[i] + tau * (mv_[i] + gv[i]);
}

void Stepper::propagate(std::span<const double> y, double tau, std::span<double> out) {
    const double half = 0.5 * tau;
    const auto& m = op_.m;
    m.apply(y, mv_);
    for (std::size_t i = 0; i < y.size(); ++i) rhs_[i] = y[i] + half * mv_[i];
    for (std::size_t i = 0; i < m.size(); ++i) implicit_.diag[i] = 1.0 - half * m.diag[i];
    for (std::size_t i = 0; i < m.sub.size(); ++i) {
        implicit_.sub[i] = -half * m.sub[i];
        implicit_.sup[i] = -half * m.sup[i];
    }
    thomas_solve(implicit_, rhs_, out, scratch_);
}

void Stepper::step(std::span<const double> v, std::span<const double> gv, double tau,
                   std::span<double> w, std::span<double> v_next) {
    const double half = 0.5 * tau;
    predict(v, gv, tau, w);
    g_eval(w, model_, gw_);

    for (std::size_t i = 0; i < v.size(); ++i) y_[i] = v[i] + half * gv[i];
    propagate(y_, tau, v_next);
    for (std::size_t i = 0; i < v.size(); ++i) v_next[i] += half * gw_[i];
}

}  // namespace kawarada
