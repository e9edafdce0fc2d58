#pragma once

// Internal helpers shared by the 1-D and 2-D drivers.

#include "kawarada/error.hpp"
#include "kawarada/solver.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace kawarada::detail {

/// Neumaier compensated sum; keeps t_l = t_0 + sum tau_k accurate over
/// millions of small steps.
class CompensatedSum {
public:
    explicit CompensatedSum(double start = 0.0) : sum_(start) {}

    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) comp_ += (sum_ - t) + x;
        else comp_ += (x - t) + sum_;
        sum_ = t;
    }

    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

class HistoryRecorder {
public:
    HistoryRecorder(const RunOptions& opt, double t0, double t_end)
        : opt_(opt), next_snapshot_(t0 + opt.first_snapshot) {
        const int n = std::max(1, opt.geometric_snapshots);
        const double span = std::max(t_end - t0, opt.first_snapshot);
        ratio_ = std::pow(span / opt.first_snapshot, 1.0 / n);
        t0_ = t0;
    }

    void scalars(double t, double max_u, double max_ut) {
        if (!h_.times.empty() && !(t > h_.times.back())) return;
        h_.times.push_back(t);
        h_.max_u.push_back(max_u);
        h_.max_ut.push_back(max_ut);
    }

    void state(double t, std::span<const double> v) {
        if (!opt_.keep_snapshots) return;
        if (h_.snapshots.empty() || t >= next_snapshot_) {
            h_.snapshots.push_back({t, {v.begin(), v.end()}});
            while (next_snapshot_ <= t) {
                next_snapshot_ = t0_ + (next_snapshot_ - t0_) * ratio_;
            }
        }
        if (opt_.tail_steps == 0) return;
        if (tail_.size() == opt_.tail_steps) {
            Snapshot recycled = std::move(tail_.front());
            tail_.pop_front();
            recycled.t = t;
            recycled.v.assign(v.begin(), v.end());
            tail_.push_back(std::move(recycled));
        } else {
            tail_.push_back({t, {v.begin(), v.end()}});
        }
    }

    RunHistory finish() {
        auto& snaps = h_.snapshots;
        for (auto& s : tail_) snaps.push_back(std::move(s));
        tail_.clear();
        std::stable_sort(snaps.begin(), snaps.end(),
                         [](const Snapshot& a, const Snapshot& b) { return a.t < b.t; });
        snaps.erase(std::unique(snaps.begin(), snaps.end(),
                                [](const Snapshot& a, const Snapshot& b) { return a.t == b.t; }),
                    snaps.end());
        return std::move(h_);
    }

private:
    const RunOptions& opt_;
    RunHistory h_;
    std::deque<Snapshot> tail_;
    double next_snapshot_;
    double ratio_ = 2.0;
    double t0_ = 0.0;
};

inline bool all_finite(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

/// Shared time loop. `Engine` provides
///   double ceiling() const;
///   double source(span v, span gv);                 // g(v) into gv, returns ||g||_inf
///   void rhs(span v, span gv, span out);            // M v + g(v)
///   void step(span v, span gv, double tau, span w, span v_next);  // may throw QuenchOverflow
/// The caller fills in the quench location from `state.v`.
template <class Engine>
RunResult drive(Engine& engine, std::vector<double> v0, const StepConfig& cfg, double t_end,
                const RunOptions& options) {
    const std::size_t n = v0.size();
    const double ceiling = engine.ceiling();

    RunResult out;
    SolverState& st = out.state;
    st.v = std::move(v0);
    st.t = options.t0;

    if (!all_finite(st.v)) {
        throw NumericalFailure("non-finite initial state", st.t, 0, st.v);
    }
    if (n == 0 || *std::max_element(st.v.begin(), st.v.end()) >= 1.0) {
        throw Error(ErrorCode::InvalidArgument, "initial state must be non-empty with max u0 < 1");
    }

    std::vector<double> gv(n), w(n), v_next(n), ut0(n);
    st.g_inf = engine.source(st.v, gv);
    st.max_v = *std::max_element(st.v.begin(), st.v.end());
    st.triggered = st.max_v >= cfg.trigger_level;

    HistoryRecorder rec(options, options.t0, t_end);
    CompensatedSum clock(options.t0);
    AuditSummary& audit = out.audits;
    QuenchReport& report = out.report;

    // u_t at t0 straight from the semi-discrete right-hand side.
    engine.rhs(st.v, gv, ut0);
    rec.scalars(st.t, st.max_v, *std::max_element(ut0.begin(), ut0.end()));
    rec.state(st.t, st.v);

    while (st.t < t_end) {
        double tau = adapt_tau(st, cfg, ceiling);
        const double remaining = t_end - st.t;
        if (remaining <= 1e-14 * std::max(1.0, std::abs(t_end))) break;
        if (tau > remaining) tau = remaining;

        for (;;) {
            try {
                engine.step(st.v, gv, tau, w, v_next);
            } catch (const QuenchOverflow&) {
                // Predictor reached unity. Retry with smaller steps down to the
                // floor, then take the predictor itself as the quenching state.
                if (tau > cfg.tau_min()) {
                    tau = std::max(0.5 * tau, cfg.tau_min());
                    continue;
                }
                v_next = w;
            }
            break;
        }

        if (!(tau < ceiling)) {
            ++audit.cfl_violations;
            st.audits.cfl_ok = false;
            throw Error(ErrorCode::CflViolation,
                        fmt::format("step {} uses tau = {} >= ceiling {}", st.ell, tau, ceiling));
        }
        if (!all_finite(v_next)) {
            throw NumericalFailure(
                fmt::format("non-finite solution at step {}, t = {}", st.ell, st.t), st.t, st.ell,
                st.v);
        }

        bool any_at_unity = false;
        for (std::size_t i = 0; i < n; ++i) {
            const double dec = st.v[i] - v_next[i];
            if (dec > options.monotone_tol) {
                ++audit.monotone_violations;
                st.audits.monotone = false;
                audit.worst_decrease = std::max(audit.worst_decrease, dec);
            }
            if (!(v_next[i] > 0.0)) {
                ++audit.positivity_violations;
                st.audits.positive = false;
            }
            any_at_unity = any_at_unity || st.v[i] >= 1.0;
        }
        if (any_at_unity) ++audit.bound_violations;

        const double ut = max_ut(st.v, v_next, tau, cfg.tau_min_c);
        report.max_ut = std::max(report.max_ut, ut);

        clock.add(tau);
        st.t = clock.value();
        ++st.ell;
        st.tau_last = tau;
        st.v.swap(v_next);
        out.taus.push_back(tau);

        const QuenchStatus qs = check_quench(st.v);
        st.max_v = st.v[qs.index];
        const bool last = qs.quenched || !(st.t < t_end);
        if (last || st.triggered || st.ell % options.scalar_stride == 0) {
            rec.scalars(st.t, st.max_v, ut);
        }
        rec.state(st.t, st.v);
        if (qs.quenched) break;

        st.g_inf = engine.source(st.v, gv);
        if (st.max_v >= cfg.trigger_level) st.triggered = true;
    }

    report.quenched = check_quench(st.v).quenched;
    report.t_quench = st.t;
    report.steps_total = st.ell;
    out.history = rec.finish();
    return out;
}

}  // namespace kawarada::detail
