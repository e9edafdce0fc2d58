#include "helpers.hpp"

#include "kawarada/solver.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>
#include <sstream>

using namespace kawarada;
using testing::code_of;

namespace {

Problem1D classical(std::size_t n, double a) {
    Grid1D g = make_parabolic_arclength_grid(n, 4.0, 0.0);
    SourceModel m = make_source(std::vector<double>(n, 1.0));
    return Problem1D{std::move(g), std::move(m), a, {}};
}

}  // namespace

TEST_CASE("quench check") {
    CHECK_FALSE(check_quench(std::vector<double>(4, 0.5)).quenched);
    const QuenchStatus s = check_quench(std::vector<double>{0.3, 1.0, 0.4});
    CHECK(s.quenched);
    CHECK(s.index == 1);
    const QuenchStatus tie = check_quench(std::vector<double>{1.0, 1.0});
    CHECK(tie.quenched);
    CHECK(tie.index == 0);
}

TEST_CASE("temporal derivative estimate") {
    const std::vector<double> a{0.1, 0.2, 0.3};
    std::vector<double> b = a;
    for (auto& x : b) x += 0.01;
    for (double u : estimate_ut(a, b, 0.01, 1.0)) CHECK(u == doctest::Approx(1.0));
    for (double u : estimate_ut(a, a, 0.01, 1.0)) CHECK(u == 0.0);

    // At the floor tau = c * 1e-6 the scaled form is used.
    const std::vector<double> p{0.0};
    const std::vector<double> q{4e-6};
    const double scaled = estimate_ut(p, q, 2e-6, 2.0)[0];
    CHECK(scaled == 2.0);
    CHECK(std::abs(scaled - 4e-6 / 2e-6) <= std::nextafter(2.0, 3.0) - 2.0);
    CHECK(max_ut(p, q, 2e-6, 2.0) == 2.0);

    CHECK(code_of([&] { estimate_ut(a, b, 0.0, 1.0); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([&] { max_ut(a, b, -1.0, 1.0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("classical quench on a coarse symmetric grid") {
    const Problem1D pb = classical(61, 2.0);
    const RunResult r = run_1d(pb, StepConfig{}, 5.0);
    CHECK(r.report.quenched);
    CHECK(r.report.x_quench == 0.0);
    CHECK(r.report.t_quench == doctest::Approx(0.5094).epsilon(0.02));
    CHECK(r.state.max_v >= 1.0);
    CHECK(r.report.t_quench == r.state.t);
    CHECK(r.audits.clean());
    CHECK(r.report.steps_total == static_cast<long>(r.taus.size()));

    // Clock consistency with the accepted steps.
    long double sum = 0.0L;
    for (double tau : r.taus) sum += tau;
    CHECK(std::abs(static_cast<double>(sum) - r.state.t) <= 1e-12 * r.state.t);

    // History invariants.
    const auto& h = r.history;
    for (std::size_t i = 1; i < h.times.size(); ++i) CHECK(h.times[i] > h.times[i - 1]);
    CHECK(h.max_u.back() >= 1.0);
    CHECK_FALSE(h.snapshots.empty());
    CHECK(h.snapshots.back().t == r.state.t);
}

TEST_CASE("step sizes shrink after the trigger") {
    const RunResult r = run_1d(classical(41, 2.0), StepConfig{}, 5.0);
    REQUIRE(r.report.quenched);
    const double first = r.taus.front();
    const double last = r.taus.back();
    CHECK(last < first);
    CHECK(last >= StepConfig{}.tau_min());
    for (double tau : r.taus) CHECK(tau <= first);
}

TEST_CASE("no quench below the critical size") {
    const RunResult r = run_1d(classical(41, 0.5), StepConfig{}, 3.0);
    CHECK_FALSE(r.report.quenched);
    CHECK(r.report.t_quench == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(r.state.max_v < 0.2);
    CHECK(r.audits.clean());
}

TEST_CASE("symmetric problems stay symmetric") {
    const std::size_t n = 41;
    Grid1D g = make_parabolic_arclength_grid(n, 4.0, 0.0);
    std::vector<double> s = sigma_on_grid(g, 0.5);
    Problem1D pb{g, make_source(s), 2.0, {}};
    RunOptions opt;
    opt.tail_steps = 0;
    const RunResult r = run_1d(pb, StepConfig{}, 0.3, opt);
    CHECK_FALSE(r.report.quenched);
    for (const auto& snap : r.history.snapshots) {
        for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(snap.v[i] - snap.v[n - 1 - i]) <= 1e-10);
    }
}

TEST_CASE("monotone and positive from rest") {
    const std::size_t n = 31;
    Grid1D g = make_parabolic_arclength_grid(n, 4.0, 0.2);
    Problem1D pb{g, make_source(sigma_on_grid(g, 0.7)), 2.0, std::vector<double>(n, 0.0)};
    const RunResult r = run_1d(pb, StepConfig{}, 5.0);
    CHECK(r.report.quenched);
    CHECK(r.audits.monotone_violations == 0);
    CHECK(r.audits.positivity_violations == 0);
    CHECK(r.audits.bound_violations == 0);
    CHECK(r.audits.cfl_violations == 0);
}

TEST_CASE("run argument checks") {
    Problem1D pb = classical(11, 2.0);
    pb.u0 = std::vector<double>(5, 0.0);
    CHECK(code_of([&] { run_1d(pb, StepConfig{}, 1.0); }) == ErrorCode::InvalidArgument);
    Problem1D pb2 = classical(11, 2.0);
    pb2.model = make_source(std::vector<double>(7, 1.0));
    CHECK(code_of([&] { run_1d(pb2, StepConfig{}, 1.0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("non-finite state is reported") {
    Problem1D pb = classical(11, 2.0);
    pb.u0 = std::vector<double>(11, 0.0);
    pb.u0[3] = std::nan("");
    try {
        run_1d(pb, StepConfig{}, 1.0);
        FAIL("expected a numerical failure");
    } catch (const NumericalFailure& e) {
        CHECK(e.code() == ErrorCode::NumericalFailure);
        CHECK(e.state().size() == 11);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NumericalFailure);
    }
}

TEST_CASE("csv exports") {
    const Problem1D pb = classical(11, 2.0);
    const RunResult r = run_1d(pb, StepConfig{}, 5.0);
    std::stringstream rep, hist, snaps;
    write_report_csv(rep, r.report);
    write_history_csv(hist, r.history);
    write_snapshots_csv(snaps, r.history, pb.grid);
    CHECK(rep.str().rfind("quenched,t_quench,x_quench,max_ut,steps\ntrue,", 0) == 0);
    CHECK(hist.str().rfind("t,max_u,max_ut\n", 0) == 0);
    CHECK(snaps.str().rfind("t,x,u\n", 0) == 0);
    // Boundary rows are written with zero values.
    std::string line;
    std::getline(snaps, line);
    std::getline(snaps, line);
    CHECK(line.find(",-1,0") != std::string::npos);

    QuenchReport two = r.report;
    two.y_quench = 0.25;
    std::stringstream rep2;
    write_report_csv(rep2, two);
    CHECK(rep2.str().rfind("quenched,t_quench,x_quench,y_quench,max_ut,steps\n", 0) == 0);
}
