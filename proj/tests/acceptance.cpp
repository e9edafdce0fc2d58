// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include "kawarada/diagnostics.hpp"
#include "kawarada/experiment.hpp"
#include "kawarada/lod.hpp"
#include "kawarada/stepper.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

using namespace kawarada;

namespace {

struct Criterion {
    int id;
    std::string title;
    std::vector<std::pair<bool, std::string>> checks;

    void add(bool ok, std::string what) { checks.emplace_back(ok, std::move(what)); }
    bool pass() const {
        return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.first; });
    }
};

bool within_rel(double got, double want, double rel) { return std::abs(got - want) <= rel * std::abs(want); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

RunOptions quiet() {
    RunOptions o;
    o.keep_snapshots = false;
    o.scalar_stride = 10;
    return o;
}

double h_max_of(const Grid1D& g) {
    double h = 0.0;
    for (std::size_t i = 0; i <= g.n_interior(); ++i) h = std::max(h, g.h(i));
    return h;
}

Criterion classical_quench() {
    Criterion c{1, "classical quench time and location", {}};
    const auto t0 = std::chrono::steady_clock::now();
    const ExperimentConfig cfg = preset_defaults(Preset::Exp1Quench);
    const RunResult r = run_configured(cfg, quiet());
    const double secs = seconds_since(t0);
    const double want = 0.509391490538887;
    c.add(r.report.quenched, "quenched");
    c.add(within_rel(r.report.t_quench, want, 0.02),
          fmt::format("T* = {:.9f} vs {:.9f} (2%, rel err {:.2e})", r.report.t_quench, want,
                      std::abs(r.report.t_quench / want - 1.0)));
    c.add(r.report.x_quench == 0.0, fmt::format("x* = {} (exactly 0)", r.report.x_quench));
    c.add(secs < 60.0, fmt::format("runtime {:.2f} s < 60 s", secs));
    return c;
}

Criterion global_existence() {
    Criterion c{2, "global existence at a = 0.5", {}};
    const ExperimentConfig cfg = preset_defaults(Preset::Exp1Global);
    RunOptions opt = quiet();
    opt.scalar_stride = 1;
    const RunResult r = run_configured(cfg, opt);
    const double umax = r.state.max_v;
    const double ut = r.history.max_ut.back();
    c.add(!r.report.quenched, "no quench");
    c.add(std::abs(r.state.t - 1.052907287028235) <= 1e-9, fmt::format("reached t = {:.12f}", r.state.t));
    c.add(within_rel(umax, 0.141813667464453, 0.05), fmt::format("max u = {:.9f} vs 0.141813667 (5%)", umax));
    c.add(within_rel(ut, 1.4689e-4, 0.25), fmt::format("max u_t = {:.5e} vs 1.4689e-4 (25%)", ut));
    return c;
}

Criterion critical_domain() {
    Criterion c{3, "critical domain size", {}};
    const double a_star = kappa_constant() * std::sqrt(2.0);
    c.add(std::abs(a_star - 0.765228037955310) <= 1e-6,
          fmt::format("kappa*sqrt(2) = {:.15f} vs 0.765228037955310 (1e-6, diff {:.2e})", a_star,
                      std::abs(a_star - 0.765228037955310)));

    ExperimentConfig below = preset_defaults(Preset::Exp1Quench);
    below.a = 0.76;
    below.t_end = 20.0;
    const RunResult rb = run_configured(below, quiet());
    c.add(!rb.report.quenched, fmt::format("a = 0.76: no quench by t = 20 (max u = {:.6f})", rb.state.max_v));

    ExperimentConfig above = below;
    above.a = 0.7652281;
    above.t_end = 200.0;
    const RunResult ra = run_configured(above, quiet());
    const double want = 9.752350010587456;
    c.add(ra.report.quenched && within_rel(ra.report.t_quench, want, 0.15),
          fmt::format("a = 0.7652281: quenched = {}, T* = {:.6f} vs {:.6f} (15%)", ra.report.quenched,
                      ra.report.t_quench, want));
    return c;
}

Criterion domain_scan() {
    Criterion c{4, "T*(a) scan shape over 50 domain sizes", {}};
    const ExperimentConfig cfg = preset_defaults(Preset::Exp1Scan);
    const std::vector<ScanResultRow> rows = scan_rows(cfg);
    c.add(rows.size() == 50, fmt::format("{} rows", rows.size()));
    bool all_quench = true;
    for (const auto& r : rows) all_quench = all_quench && !r.error && r.quenched;
    c.add(all_quench, "every row quenches");
    if (rows.empty() || !all_quench) return c;

    const auto it = std::min_element(rows.begin(), rows.end(),
                                     [](const auto& x, const auto& y) { return x.t_quench < y.t_quench; });
    const auto k = static_cast<std::size_t>(it - rows.begin());
    bool decreasing = true;
    for (std::size_t i = 1; i <= k; ++i) decreasing = decreasing && rows[i].t_quench < rows[i - 1].t_quench;
    const double spacing = rows[1].param - rows[0].param;
    c.add(decreasing, fmt::format("strictly decreasing from a = {:.4f} up to the minimum", rows[0].param));
    c.add(std::abs(it->param - 3.8321581) <= 2.0 * spacing,
          fmt::format("minimum at a = {:.4f}, expected near 3.8321581 (two scan spacings)", it->param));
    c.add(within_rel(it->t_quench, 0.499360935318447, 0.03),
          fmt::format("min T* = {:.9f} vs 0.499360935 (3%)", it->t_quench));
    bool rising = true;
    for (std::size_t i = k + 1; i < rows.size(); ++i) rising = rising && rows[i].t_quench >= rows[i - 1].t_quench;
    c.add(rising && k + 1 < rows.size(), "mildly increasing after the minimum");
    c.add(within_rel(rows.back().t_quench, 0.516, 0.03),
          fmt::format("T*(10.7552281) = {:.6f} vs 0.516 (3%)", rows.back().t_quench));
    c.add(true, fmt::format("T*(first) = {:.6f}", rows.front().t_quench));
    return c;
}

Criterion degeneracy() {
    Criterion c{5, "degenerate sigma: quench time, location, p-sweep", {}};
    const ExperimentConfig cfg = preset_defaults(Preset::Exp2Degenerate);
    const RunResult r = run_configured(cfg, quiet());
    const Problem1D pb = build_problem_1d(cfg);
    const double cell = h_max_of(pb.grid);
    c.add(r.report.quenched && within_rel(r.report.t_quench, 0.905541681825887, 0.03),
          fmt::format("golden p: T* = {:.9f} vs 0.905541682 (3%)", r.report.t_quench));
    c.add(std::abs(r.report.x_quench + 0.378707538403295) <= cell,
          fmt::format("golden p: x* = {:.6f} vs -0.378708 (one coarse cell {:.4f})", r.report.x_quench, cell));

    const ExperimentConfig sweep = preset_defaults(Preset::Exp2Sweep);
    const std::vector<ScanResultRow> rows = scan_rows(sweep);
    bool ok = rows.size() == 11;
    for (const auto& row : rows) ok = ok && !row.error && row.quenched;
    c.add(ok, "p-sweep: 11 rows, all quench");
    if (!ok) return c;

    const auto mx = std::max_element(rows.begin(), rows.end(),
                                      [](const auto& x, const auto& y) { return x.t_quench < y.t_quench; });
    const auto mn = std::min_element(rows.begin(), rows.end(),
                                     [](const auto& x, const auto& y) { return x.t_quench < y.t_quench; });
    c.add(std::abs(mx->param - 0.5) < 1e-12 && within_rel(mx->t_quench, 0.964575637131343, 0.05),
          fmt::format("max T* at p = {:.2f}: {:.6f} vs 0.964576 at p = 0.5 (5%)", mx->param, mx->t_quench));
    c.add((mn->param < 0.15 || mn->param > 0.85) && within_rel(mn->t_quench, 0.394063444318618, 0.05),
          fmt::format("min T* at p = {:.2f}: {:.6f} vs 0.394063 near p in {{0,1}} (5%)", mn->param, mn->t_quench));
    c.add(std::abs(rows.front().x_quench + 0.552238805970151) <= cell,
          fmt::format("x*(p=0) = {:.6f} vs -0.552239 (grid resolution {:.4f})", rows.front().x_quench, cell));
    // Mirror pairs p and 1 - p; the self-paired middle row has a tied two-peak maximum.
    double worst = 0.0;
    for (std::size_t i = 0; i < rows.size() / 2; ++i) {
        worst = std::max(worst, std::abs(rows[i].x_quench + rows[rows.size() - 1 - i].x_quench));
    }
    c.add(worst <= cell, fmt::format("x*(p) antisymmetric about p = 0.5 (worst |x*(p) + x*(1-p)| = {:.2e})", worst));
    return c;
}

Criterion stochastic() {
    Criterion c{6, "stochastic 1-D runs over 10 seeds", {}};
    const double floor = 0.5094 * 1.02;
    std::vector<double> ts;
    bool all_later = true;
    std::string list;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        ExperimentConfig cfg = preset_defaults(Preset::Exp3Stochastic);
        cfg.seed = seed;
        const RunResult r = run_configured(cfg, quiet());
        const double t = r.report.quenched ? r.report.t_quench : std::numeric_limits<double>::infinity();
        ts.push_back(t);
        all_later = all_later && r.report.quenched && t > floor;
        list += fmt::format("{}{:.4f}", list.empty() ? "" : " ", t);
    }
    c.add(all_later, fmt::format("every seed quenches with T* > {:.5f}: [{}]", floor, list));
    std::vector<double> sorted = ts;
    std::sort(sorted.begin(), sorted.end());
    const double median = 0.5 * (sorted[4] + sorted[5]);
    const auto inside = std::count_if(ts.begin(), ts.end(), [](double t) { return t >= 1.5 && t <= 2.5; });
    c.add(median >= 1.5 && median <= 2.5, fmt::format("median T* = {:.4f} in [1.5, 2.5]", median));
    c.add(inside >= 8, fmt::format("{} of 10 seeds in [1.5, 2.5] (need 8)", inside));
    return c;
}

Criterion two_d() {
    Criterion c{7, "2-D LOD quench", {}};
    bool window = true, near = true;
    std::string list;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        ExperimentConfig cfg = preset_defaults(Preset::Exp4TwoD);
        cfg.seed = seed;
        const RunResult r = run_configured(cfg, quiet());
        const double y = r.report.y_quench.value_or(NAN);
        const double dist = std::hypot(r.report.x_quench, y);
        window = window && r.report.quenched && r.report.t_quench >= 2.0 && r.report.t_quench <= 3.2;
        near = near && r.report.quenched && dist <= 0.12;
        list += fmt::format("{}(T*={:.4f}, r={:.4f})", list.empty() ? "" : " ", r.report.t_quench, dist);
    }
    c.add(window, fmt::format("seeded T* in [2.0, 3.2]: {}", list));
    c.add(near, "seeded quench locations within 0.12 of the origin");

    ExperimentConfig plain = preset_defaults(Preset::Exp4TwoD);
    plain.seed.reset();
    const RunResult r = run_configured(plain, quiet());
    c.add(r.report.quenched && r.report.x_quench == 0.0 && r.report.y_quench == 0.0,
          fmt::format("noise-free: quench at ({}, {}) T* = {:.6f}", r.report.x_quench,
                      r.report.y_quench.value_or(NAN), r.report.t_quench));
    return c;
}

Grid1D random_grid(std::mt19937_64& rng, std::size_t n, double spread) {
    std::uniform_real_distribution<double> w(1.0, spread);
    std::vector<double> cells(n + 1);
    double total = 0.0;
    for (auto& x : cells) total += (x = w(rng));
    std::vector<double> nodes(n + 2, 1.0);
    nodes[0] = -1.0;
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) nodes[i + 1] = -1.0 + 2.0 * (acc += cells[i]) / total;
    return Grid1D(std::move(nodes));
}

std::vector<double> uniform_values(std::mt19937_64& rng, std::size_t n, double lo, double hi) {
    std::uniform_real_distribution<double> d(lo, hi);
    std::vector<double> v(n);
    for (auto& x : v) x = d(rng);
    return v;
}

Criterion structure() {
    Criterion c{8, "structure preservation over randomized configurations", {}};
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    long inv_neg = 0, expl_neg = 0, rowsum = 0, mono = 0, pos = 0, first = 0, covered = 0;
    const int configs = 60;
    for (int trial = 0; trial < configs; ++trial) {
        const std::size_t n = 3 + static_cast<std::size_t>(trial % 38);
        const Grid1D g = random_grid(rng, n, 1.0 + 7.0 * u(rng));
        const std::vector<double> sigma =
            trial % 2 == 0 ? sigma_on_grid(g, u(rng)) : uniform_values(rng, n, 0.05, 3.0);
        const std::vector<double> phi = phi_squared(uniform_values(rng, n, 0.01, 1.0));
        const double a = 0.3 + 4.0 * u(rng);
        const DiscreteOperator op = assemble_M(g, sigma, a);
        const double tau = (0.02 + 0.97 * u(rng)) * cfl_ceiling(op);

        const auto nn = static_cast<Eigen::Index>(n);
        const DenseMatrix id = DenseMatrix::Identity(nn, nn);
        const DenseMatrix lhs = id - 0.5 * tau * dense_M(op);
        const DenseMatrix inv = lhs.inverse();
        if (inv.minCoeff() < -1e-14 * inv.cwiseAbs().maxCoeff()) ++inv_neg;
        if ((id + 0.5 * tau * dense_M(op)).minCoeff() < 0.0) ++expl_neg;
        const Eigen::VectorXd rs = lhs * Eigen::VectorXd::Ones(nn);
        if (rs.minCoeff() < 1.0 - 1e-12 || !(rs[0] > 1.0) || !(rs[nn - 1] > 1.0)) ++rowsum;

        const SourceModel m = make_source(phi, sigma, 1.0);
        Problem1D pb{g, m, a, std::vector<double>(n, 0.0)};
        StepConfig sc;
        sc.tau_base = std::max(tau, 10.0 * sc.tau_min());
        RunOptions opt = quiet();
        opt.monotone_tol = 0.0;
        const RunResult r = run_1d(pb, sc, 0.5, opt);
        mono += r.audits.monotone_violations;
        pos += r.audits.positivity_violations;

        const double arg = tau * m.phi_max() * SourceModel::f0 / m.sigma_min();
        if (arg < 1.0 && op.h_max * op.h_max < 2.0 * op.b_norm() / (a * a * f_eval(arg, 1.0))) {
            ++covered;
            const StepResult s = cn_step(std::vector<double>(n, 0.0), tau, op, m);
            if (!(*std::max_element(s.v_next.begin(), s.v_next.end()) < 1.0)) ++first;
        }
    }
    c.add(inv_neg == 0, fmt::format("inverse-positivity of the implicit factor: {} violations", inv_neg));
    c.add(expl_neg == 0, fmt::format("nonnegativity of the explicit factor: {} violations", expl_neg));
    c.add(rowsum == 0, fmt::format("implicit factor row sums >= 1: {} violations", rowsum));
    c.add(mono == 0, fmt::format("monotone increase from rest: {} violations", mono));
    c.add(pos == 0, fmt::format("strict positivity after the first step: {} violations", pos));
    c.add(first == 0, fmt::format("first-step bound: {} violations over {} covered configurations", first, covered));
    c.add(configs >= 50, fmt::format("{} configurations", configs));
    return c;
}

Criterion numerics() {
    Criterion c{9, "numerical analysis suite", {}};
    std::mt19937_64 rng(9);

    {
        const Grid1D g = make_parabolic_arclength_grid(6, 3.0, 0.0);
        const DenseMatrix m = dense_M(assemble_M(g, std::vector<double>{0.7, 1.0, 1.2, 1.2, 1.0, 0.7}, 1.0));
        const double r1 = pade_local_error(m, 0.002) / pade_local_error(m, 0.001);
        const double r2 = pade_local_error(m, 0.001) / pade_local_error(m, 0.0005);
        c.add(r1 >= 6.5 && r1 <= 9.5 && r2 >= 6.5 && r2 <= 9.5,
              fmt::format("Pade local error ratios {:.4f}, {:.4f} in [6.5, 9.5]", r1, r2));

        const DiscreteOperator op = assemble_M(g, std::vector<double>{0.7, 1.0, 1.2, 1.2, 1.0, 0.7}, 1.0);
        LinearOrderConfig oc{op, {0.2, 0.6, 1.0, 0.8, 0.5, 0.1}, {1.0, 0.5, 2.0, 1.0, 0.3, 0.7}, 0.02, 0.005};
        const OrderEstimate oe = temporal_order_estimate(oc);
        c.add(!oe.degenerate && oe.estimated_order >= 1.8 && oe.estimated_order <= 2.2,
              fmt::format("temporal order {:.4f} in [1.8, 2.2]", oe.estimated_order));
    }

    {
        double worst = 0.0;
        for (int trial = 0; trial < 50; ++trial) {
            const Grid1D g = random_grid(rng, 3 + trial, 6.0);
            const Tridiagonal p = assemble_P(g);
            const std::size_t n = g.n_interior();
            for (std::size_t i = 0; i < n; ++i) {
                const double hl = g.h(i), hr = g.h(i + 1);
                const double l = i > 0 ? p.sub[i - 1] : 2.0 / (hl * (hl + hr));
                const double r = i + 1 < n ? p.sup[i] : 2.0 / (hr * (hl + hr));
                const double d = p.diag[i];
                const double xl = g.x(i), x = g.x(i + 1), xr = g.x(i + 2);
                const double scale = std::abs(d);
                worst = std::max({worst, std::abs(l + d + r) / scale, std::abs(l * xl + d * x + r * xr) / scale,
                                  std::abs(l * xl * xl + d * x * x + r * xr * xr - 2.0) / 2.0});
            }
        }
        c.add(worst <= 1e-10, fmt::format("stencil exact on 1, x, x^2: worst relative residual {:.2e}", worst));
    }

    {
        bool ok = true;
        for (std::size_t n = 1; n <= 12; ++n) {
            for (int k = 0; k < 5; ++k) {
                const Grid1D g = random_grid(rng, n, 6.0);
                const DiscreteOperator op = assemble_M(g, uniform_values(rng, n, 0.05, 3.0), 0.5 + 3.0 * k);
                for (const auto& ev : dense_eigenvalues(dense_M(op))) {
                    ok = ok && ev.real() < 0.0 && std::abs(ev.imag()) <= 1e-10 * std::abs(ev.real());
                }
            }
        }
        c.add(ok, "dense eigenvalues of M real and negative for N <= 12");
    }

    {
        double worst_sigma = 0.0, worst_grid = 0.0;
        for (int trial = 0; trial < 40; ++trial) {
            const std::size_t n = 3 + static_cast<std::size_t>(trial % 20);
            const Grid1D gu = make_uniform_grid(n);
            const DiscreteOperator ou = assemble_M(gu, uniform_values(rng, n, 0.1, 3.0), 2.0);
            worst_sigma = std::max(worst_sigma, weighted_pade_norm(ou, gu, 0.9 * cfl_ceiling(ou), Weight::Sigma));
            const Grid1D gn = random_grid(rng, n, 5.0);
            const DiscreteOperator on = assemble_M(gn, uniform_values(rng, n, 0.1, 3.0), 2.0);
            worst_grid = std::max(worst_grid, weighted_pade_norm(on, gn, 0.9 * cfl_ceiling(on), Weight::Grid));
        }
        c.add(worst_sigma <= 1.0 + 1e-10,
              fmt::format("weighted Pade contraction, sigma weight, uniform grids: {:.15f}", worst_sigma));
        c.add(worst_grid <= 1.0 + 1e-10,
              fmt::format("weighted Pade contraction, grid weight, nonuniform grids: {:.15f}", worst_grid));
    }

    {
        const std::size_t n = 41;
        const Grid1D g = make_uniform_grid(n);
        std::vector<double> sigma = uniform_values(rng, n, 0.5, 2.0);
        ProbeConfig cfg{Problem1D{g, make_source(sigma), 2.0, {}}};
        const StabilityProbeResult r = stability_probe(cfg);
        const double lim = std::sqrt(*std::max_element(sigma.begin(), sigma.end()) /
                                     *std::min_element(sigma.begin(), sigma.end())) + 0.1;
        c.add(r.amplification <= lim,
              fmt::format("frozen probe, random sigma: amplification {:.6f} <= {:.6f}", r.amplification, lim));

        const ExperimentConfig deg = preset_defaults(Preset::Exp2Degenerate);
        ProbeConfig dc{build_problem_1d(deg)};
        const StabilityProbeResult d = stability_probe(dc);
        const auto& s = dc.problem.model.sigma;
        const double dlim = std::sqrt(*std::max_element(s.begin(), s.end()) / *std::min_element(s.begin(), s.end())) + 0.1;
        c.add(d.amplification <= dlim,
              fmt::format("frozen probe, degenerate sigma: amplification {:.6f} <= {:.6f}", d.amplification, dlim));
    }

    for (Preset p : {Preset::Exp1Quench, Preset::Exp2Degenerate}) {
        const ExperimentConfig cfg = preset_defaults(p);
        const RunResult base = run_configured(cfg, quiet());
        ProbeConfig pc{build_problem_1d(cfg)};
        pc.frozen = false;
        pc.t_final = 0.8 * base.report.t_quench;
        const StabilityProbeResult r = stability_probe(pc);
        c.add(r.amplification <= r.bound,
              fmt::format("nonlinear probe ({}) at t = {:.4f}: amplification {:.6f} <= exp(G t) sqrt(kappa(B)) = {:.6f}",
                          to_string(p), pc.t_final, r.amplification, r.bound));
    }
    return c;
}

}  // namespace

int main() {
    using Fn = Criterion (*)();
    const Fn criteria[] = {classical_quench, global_existence, critical_domain, domain_scan, degeneracy,
                           stochastic,       two_d,            structure,       numerics};
    int failed = 0;
    for (int k = 0; k < 9; ++k) {
        const auto t0 = std::chrono::steady_clock::now();
        Criterion c{k + 1, "(aborted)", {}};
        try {
            c = criteria[k]();
        } catch (const std::exception& e) {
            c.add(false, fmt::format("exception: {}", e.what()));
        }
        const bool ok = c.pass() && !c.checks.empty();
        failed += ok ? 0 : 1;
        fmt::print("criterion {}: {} - {} ({:.1f} s)\n", c.id, ok ? "PASS" : "FAIL", c.title, seconds_since(t0));
        for (const auto& [good, what] : c.checks) fmt::print("    [{}] {}\n", good ? "ok" : "xx", what);
        std::fflush(stdout);
    }
    fmt::print("{} of 9 criteria passed\n", 9 - failed);
    return failed == 0 ? 0 : 1;
}
