#include "kawarada/experiment.hpp"

#include "kawarada/lod.hpp"
#include "kawarada/source.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <sstream>

#ifndef KAWARADA_VERSION
#define KAWARADA_VERSION "unknown"
#endif

namespace kawarada {

namespace {

constexpr std::pair<Preset, std::string_view> preset_names[] = {
    {Preset::Exp1Global, "exp1-global"},         {Preset::Exp1Quench, "exp1-quench"},
    {Preset::Exp1Scan, "exp1-scan"},             {Preset::Exp2Degenerate, "exp2-degenerate"},
    {Preset::Exp2Sweep, "exp2-sweep"},           {Preset::Exp3Stochastic, "exp3-stochastic"},
    {Preset::Exp4TwoD, "exp4-2d"},               {Preset::Custom, "custom"},
};

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

double to_double(std::string_view key, std::string_view text) {
    const std::string s = trim(text);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
        throw Error(ErrorCode::Usage, fmt::format("{}: '{}' is not a number", key, text));
    }
    return v;
}

long to_long(std::string_view key, std::string_view text) {
    const std::string s = trim(text);
    long v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
        throw Error(ErrorCode::Usage, fmt::format("{}: '{}' is not an integer", key, text));
    }
    return v;
}

std::uint64_t to_u64(std::string_view key, std::string_view text) {
    const std::string s = trim(text);
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
        throw Error(ErrorCode::Usage, fmt::format("{}: '{}' is not an unsigned integer", key, text));
    }
    return v;
}

bool is_none(std::string_view text) { return trim(text) == "none"; }

}  // namespace

std::string_view to_string(Preset p) {
    for (const auto& [k, name] : preset_names) {
        if (k == p) return name;
    }
    return "custom";
}

Preset parse_preset(std::string_view name) {
    for (const auto& [k, n] : preset_names) {
        if (n == name) return k;
    }
    throw Error(ErrorCode::Usage, fmt::format("unknown preset '{}'", name));
}

std::string_view to_string(GridKind g) { return g == GridKind::Uniform ? "uniform" : "parabolic"; }

GridKind parse_grid_kind(std::string_view name) {
    const std::string s = trim(name);
    if (s == "uniform") return GridKind::Uniform;
    if (s == "parabolic") return GridKind::Parabolic;
    throw Error(ErrorCode::Usage, fmt::format("unknown grid kind '{}'", name));
}

std::vector<double> ScanSpec::values() const {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(count));
    for (long k = 0; k < count; ++k) {
        double v = count == 1 ? lo : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(count - 1);
        if (k == count - 1) v = hi;
        if (axis == Axis::Seed) v = std::round(v);
        out.push_back(v);
    }
    return out;
}

ScanSpec parse_scan(std::string_view text) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : text) {
        if (c == ':') {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    parts.push_back(cur);
    if (parts.size() != 4) {
        throw Error(ErrorCode::Usage, fmt::format("scan '{}' is not <axis>:<lo>:<hi>:<count>", text));
    }
    ScanSpec s;
    const std::string axis = trim(parts[0]);
    if (axis == "a") s.axis = ScanSpec::Axis::A;
    else if (axis == "p") s.axis = ScanSpec::Axis::P;
    else if (axis == "seed") s.axis = ScanSpec::Axis::Seed;
    else throw Error(ErrorCode::Usage, fmt::format("unknown scan axis '{}'", axis));
    s.lo = to_double("scan lo", parts[1]);
    s.hi = to_double("scan hi", parts[2]);
    s.count = to_long("scan count", parts[3]);
    if (s.count < 1) throw Error(ErrorCode::InvalidArgument, "scan count must be >= 1");
    if (s.hi < s.lo) throw Error(ErrorCode::InvalidArgument, "scan hi must be >= lo");
    return s;
}

std::string to_string(const ScanSpec& s) {
    const char* axis = s.axis == ScanSpec::Axis::A ? "a" : s.axis == ScanSpec::Axis::P ? "p" : "seed";
    return fmt::format("{}:{}:{}:{}", axis, s.lo, s.hi, s.count);
}

void ExperimentConfig::validate() const {
    auto fail = [](std::string msg) { throw Error(ErrorCode::InvalidArgument, std::move(msg)); };
    if (dim != 1 && dim != 2) fail(fmt::format("dim = {} must be 1 or 2", dim));
    if (!(a > 0.0) || !std::isfinite(a)) fail(fmt::format("a = {} must be positive", a));
    if (!(b > 0.0) || !std::isfinite(b)) fail(fmt::format("b = {} must be positive", b));
    if (!(theta > 0.0) || !std::isfinite(theta)) fail(fmt::format("theta = {} must be positive", theta));
    if (p && !(*p >= 0.0 && *p <= 1.0)) fail(fmt::format("p = {} must lie in [0, 1]", *p));
    if (p && dim == 2) fail("p (degeneracy) is supported for 1-D runs only");
    const long n_min = grid == GridKind::Parabolic ? 3 : 1;
    if (n_interior < n_min) fail(fmt::format("n = {} must be >= {}", n_interior, n_min));
    if (!(refinement_ratio >= 1.0)) fail(fmt::format("ratio = {} must be >= 1", refinement_ratio));
    if (!(t_end > 0.0) || !std::isfinite(t_end)) fail(fmt::format("t_end = {} must be positive", t_end));
    if (!(trigger_level > 0.0 && trigger_level < 1.0)) {
        fail(fmt::format("trigger = {} must lie in (0, 1)", trigger_level));
    }
    if (!(tau_base >= 0.0)) fail(fmt::format("tau_base = {} must be >= 0", tau_base));
    if (!(tau_min_c > 0.0)) fail(fmt::format("tau_min_c = {} must be positive", tau_min_c));
    if (stride < 1) fail(fmt::format("stride = {} must be >= 1", stride));
    if (tail < 0) fail(fmt::format("tail = {} must be >= 0", tail));
    if (scan && scan->axis == ScanSpec::Axis::P && dim == 2) fail("p scans are 1-D only");
    if (scan && scan->axis == ScanSpec::Axis::A && !(scan->lo > 0.0)) fail("a scan must stay positive");
    if (scan && scan->axis == ScanSpec::Axis::P && !(scan->lo >= 0.0 && scan->hi <= 1.0)) {
        fail("p scan must stay within [0, 1]");
    }
    if (scan && scan->axis == ScanSpec::Axis::Seed && !(scan->lo >= 0.0)) fail("seed scan must be >= 0");
    step_config().validate();
}

StepConfig ExperimentConfig::step_config() const {
    StepConfig s;
    s.tau_base = tau_base;
    s.tau_min_c = tau_min_c;
    s.trigger_level = trigger_level;
    return s;
}

ExperimentConfig preset_defaults(Preset p) {
    ExperimentConfig c;
    c.preset = p;
    switch (p) {
        case Preset::Exp1Global:
            c.a = 0.5;
            c.t_end = 1.052907287028235;
            break;
        case Preset::Exp1Quench:
            c.a = 2.0;
            break;
        case Preset::Exp1Scan:
            c.t_end = 60.0;
            c.scan = ScanSpec{ScanSpec::Axis::A, 0.7652281, 10.7552281, 50};
            break;
        case Preset::Exp2Degenerate:
            c.p = (std::sqrt(5.0) - 1.0) / 2.0;
            break;
        case Preset::Exp2Sweep:
            c.p = 0.5;
            c.scan = ScanSpec{ScanSpec::Axis::P, 0.0, 1.0, 11};
            break;
        case Preset::Exp3Stochastic:
            c.seed = 1;
            c.t_end = 20.0;
            break;
        case Preset::Exp4TwoD:
            c.dim = 2;
            c.n_interior = 81;
            c.grid = GridKind::Uniform;
            c.seed = 1;
            c.t_end = 20.0;
            c.tail = 8;
            break;
        case Preset::Custom:
            break;
    }
    return c;
}

void set_field(ExperimentConfig& cfg, std::string_view key, std::string_view value) {
    const std::string k(key);
    if (k == "preset") cfg.preset = parse_preset(trim(value));
    else if (k == "dim") cfg.dim = static_cast<int>(to_long(k, value));
    else if (k == "a") cfg.a = to_double(k, value);
    else if (k == "b") cfg.b = to_double(k, value);
    else if (k == "theta") cfg.theta = to_double(k, value);
    else if (k == "p") cfg.p = is_none(value) ? std::nullopt : std::optional(to_double(k, value));
    else if (k == "n") cfg.n_interior = to_long(k, value);
    else if (k == "grid") cfg.grid = parse_grid_kind(value);
    else if (k == "ratio") cfg.refinement_ratio = to_double(k, value);
    else if (k == "seed") cfg.seed = is_none(value) ? std::nullopt : std::optional(to_u64(k, value));
    else if (k == "t_end") cfg.t_end = to_double(k, value);
    else if (k == "trigger") cfg.trigger_level = to_double(k, value);
    else if (k == "tau_base") cfg.tau_base = to_double(k, value);
    else if (k == "tau_min_c") cfg.tau_min_c = to_double(k, value);
    else if (k == "stride") cfg.stride = to_long(k, value);
    else if (k == "tail") cfg.tail = to_long(k, value);
    else if (k == "out") cfg.output_dir = trim(value);
    else if (k == "scan") cfg.scan = is_none(value) ? std::nullopt : std::optional(parse_scan(trim(value)));
    else throw Error(ErrorCode::Usage, fmt::format("unknown key '{}'", key));
}

std::set<std::string> apply_config_text(ExperimentConfig& cfg, std::istream& in) {
    std::set<std::string> keys;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string body = trim(line);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos) {
            throw Error(ErrorCode::Usage, fmt::format("config line {}: expected 'key = value'", lineno));
        }
        const std::string key = trim(std::string_view(body).substr(0, eq));
        const std::string value = trim(std::string_view(body).substr(eq + 1));
        if (key.empty() || value.empty()) {
            throw Error(ErrorCode::Usage, fmt::format("config line {}: empty key or value", lineno));
        }
        try {
            set_field(cfg, key, value);
        } catch (const Error& e) {
            throw Error(e.code(), fmt::format("config line {}: {}", lineno, e.what()));
        }
        keys.insert(key);
    }
    return keys;
}

namespace {

// Long flag name and config key; the key is the flag with '-' -> '_'.
constexpr std::pair<std::string_view, std::string_view> flag_keys[] = {
    {"--a", "a"},           {"--b", "b"},
    {"--theta", "theta"},   {"--p", "p"},
    {"--n", "n"},           {"--grid", "grid"},
    {"--ratio", "ratio"},   {"--seed", "seed"},
    {"--t-end", "t_end"},   {"--trigger", "trigger"},
    {"--tau-base", "tau_base"}, {"--tau-min-c", "tau_min_c"},
    {"--out", "out"},       {"--scan", "scan"},
    {"--dim", "dim"},       {"--stride", "stride"},
    {"--tail", "tail"},
};

}  // namespace

std::optional<ExperimentConfig> parse_config(int argc, const char* const* argv, std::ostream& out) {
    CLI::App app{"Semi-adaptive Crank-Nicolson solver for degenerate stochastic Kawarada problems",
                 "kawarada"};
    std::string preset_name;
    std::string config_path;
    app.add_option("--preset", preset_name,
                   "exp1-global | exp1-quench | exp1-scan | exp2-degenerate | exp2-sweep | "
                   "exp3-stochastic | exp4-2d | custom");
    app.add_option("--config", config_path, "key = value file; flags override it");
    std::map<std::string, std::string> raw;
    for (const auto& [flag, key] : flag_keys) {
        app.add_option(std::string(flag), raw[std::string(key)]);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return std::nullopt;
    } catch (const CLI::ParseError& e) {
        throw Error(ErrorCode::Usage, e.what());
    }

    // The preset may come from the flag or the config file (flag wins).
    ExperimentConfig from_file;
    std::set<std::string> file_keys;
    std::string file_text;
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw Error(ErrorCode::Io, fmt::format("cannot read config file '{}'", config_path));
        std::ostringstream ss;
        ss << in.rdbuf();
        file_text = ss.str();
        std::istringstream scan_keys(file_text);
        file_keys = apply_config_text(from_file, scan_keys);
    }
    if (preset_name.empty()) {
        if (!file_keys.contains("preset")) throw Error(ErrorCode::Usage, "missing --preset");
        preset_name = std::string(to_string(from_file.preset));
    }

    ExperimentConfig cfg = preset_defaults(parse_preset(preset_name));
    if (!file_text.empty()) {
        std::istringstream again(file_text);
        apply_config_text(cfg, again);
        cfg.preset = parse_preset(preset_name);
    }
    for (const auto& [flag, key] : flag_keys) {
        if (app.count(std::string(flag)) > 0) set_field(cfg, key, raw[std::string(key)]);
    }
    cfg.validate();
    return cfg;
}

int exit_code(ErrorCode c) {
    switch (c) {
        case ErrorCode::Io:
            return 4;
        case ErrorCode::InvalidArgument:
        case ErrorCode::Usage:
        case ErrorCode::BoundaryDegeneracy:
        case ErrorCode::DegenerateInterior:
            return 3;
        default:
            return 2;
    }
}

namespace {

Grid1D build_axis(const ExperimentConfig& cfg) {
    const auto n = static_cast<std::size_t>(cfg.n_interior);
    if (cfg.grid == GridKind::Uniform) return make_uniform_grid(n);
    return make_parabolic_arclength_grid(n, cfg.refinement_ratio, 0.0);
}

std::vector<double> build_phi(const ExperimentConfig& cfg, std::size_t n) {
    if (!cfg.seed) return std::vector<double>(n, 1.0);
    return phi_squared(sample_noise(n, NoiseSpec{*cfg.seed}));
}

Problem2D build_problem_2d(const ExperimentConfig& cfg) {
    const Grid1D axis = build_axis(cfg);
    Grid2D g{axis, axis};
    std::vector<double> sigma(g.size(), 1.0);
    Problem2D pb{g, make_source(build_phi(cfg, g.size()), std::move(sigma), cfg.theta), cfg.a, cfg.b, {}};
    return pb;
}

RunOptions options_for(const ExperimentConfig& cfg) {
    RunOptions o;
    o.scalar_stride = cfg.stride;
    o.tail_steps = static_cast<std::size_t>(cfg.tail);
    return o;
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw Error(ErrorCode::Io, fmt::format("cannot open '{}' for writing", tmp.string()));
        os << content;
        os.flush();
        if (!os) throw Error(ErrorCode::Io, fmt::format("write to '{}' failed", tmp.string()));
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        throw Error(ErrorCode::Io, fmt::format("cannot rename '{}' to '{}': {}", tmp.string(),
                                               path.string(), ec.message()));
    }
}

void ensure_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir)) {
        throw Error(ErrorCode::Io, fmt::format("cannot create output directory '{}'", dir.string()));
    }
}

nlohmann::ordered_json manifest(const ExperimentConfig& cfg) {
    const StepConfig s = cfg.step_config();
    nlohmann::ordered_json j;
    j["library"] = "kawarada";
    j["version"] = KAWARADA_VERSION;
    j["preset"] = std::string(to_string(cfg.preset));
    j["dim"] = cfg.dim;
    j["a"] = cfg.a;
    if (cfg.dim == 2) j["b"] = cfg.b;
    j["theta"] = cfg.theta;
    j["sigma"] = cfg.p ? fmt::format("(x+1)^p (1-x)^(1-p), p = {}", *cfg.p) : "1";
    j["p"] = cfg.p ? nlohmann::ordered_json(*cfg.p) : nlohmann::ordered_json(nullptr);
    j["phi"] = cfg.seed ? "eps^2, eps ~ U[0.01, 1] (SplitMix64)" : "1";
    j["seed"] = cfg.seed ? nlohmann::ordered_json(*cfg.seed) : nlohmann::ordered_json(nullptr);
    j["u0"] = cfg.dim == 1 ? "0.001 (1 - cos 2 pi x)" : "0.001 (1 - cos 2 pi x)(1 - cos 2 pi y)";
    j["grid"] = std::string(to_string(cfg.grid));
    j["n_interior"] = cfg.n_interior;
    j["refinement_ratio"] = cfg.grid == GridKind::Parabolic ? cfg.refinement_ratio : 1.0;
    j["t0"] = 0.0;
    j["t_end"] = cfg.t_end;
    j["trigger_level"] = s.trigger_level;
    j["safety"] = s.safety;
    j["tau_base"] = s.tau_base;
    j["tau_min_c"] = s.tau_min_c;
    j["tau_min"] = s.tau_min();
    j["history_stride"] = cfg.stride;
    j["tail_steps"] = cfg.tail;
    if (cfg.scan) j["scan"] = to_string(*cfg.scan);
    return j;
}

}  // namespace

Problem1D build_problem_1d(const ExperimentConfig& cfg) {
    Grid1D g = build_axis(cfg);
    const std::size_t n = g.n_interior();
    std::vector<double> sigma = cfg.p ? sigma_on_grid(g, *cfg.p) : std::vector<double>(n, 1.0);
    SourceModel model = make_source(build_phi(cfg, n), std::move(sigma), cfg.theta);
    return Problem1D{std::move(g), std::move(model), cfg.a, {}};
}

RunResult run_configured(const ExperimentConfig& cfg, const RunOptions& options) {
    cfg.validate();
    if (cfg.dim == 2) return run_2d_lod(build_problem_2d(cfg), cfg.step_config(), cfg.t_end, options);
    return run_1d(build_problem_1d(cfg), cfg.step_config(), cfg.t_end, options);
}

int run_experiment(const ExperimentConfig& cfg, std::ostream& log) {
    cfg.validate();
    ensure_dir(cfg.output_dir);
    const RunResult r = run_configured(cfg, options_for(cfg));

    std::ostringstream report, history, snaps;
    write_report_csv(report, r.report);
    write_history_csv(history, r.history);
    if (cfg.dim == 2) {
        write_snapshots_csv_2d(snaps, r.history, build_problem_2d(cfg).grid);
    } else {
        write_snapshots_csv(snaps, r.history, build_axis(cfg));
    }
    nlohmann::ordered_json j = manifest(cfg);
    j["audits"] = {{"monotone_violations", r.audits.monotone_violations},
                   {"positivity_violations", r.audits.positivity_violations},
                   {"cfl_violations", r.audits.cfl_violations},
                   {"bound_violations", r.audits.bound_violations}};

    const auto& dir = cfg.output_dir;
    write_atomic(dir / "report.csv", report.str());
    write_atomic(dir / "history.csv", history.str());
    write_atomic(dir / "snapshots.csv", snaps.str());
    if (cfg.seed) {
        const std::size_t n = static_cast<std::size_t>(cfg.n_interior);
        std::ostringstream noise;
        write_noise_csv(noise, sample_noise(cfg.dim == 2 ? n * n : n, NoiseSpec{*cfg.seed}));
        write_atomic(dir / "noise.csv", noise.str());
    }
    write_atomic(dir / "manifest.json", j.dump(2) + "\n");

    const auto& q = r.report;
    if (q.y_quench) {
        log << fmt::format("quenched={} t={} x={} y={} max_ut={} steps={}\n", q.quenched, q.t_quench,
                           q.x_quench, *q.y_quench, q.max_ut, q.steps_total);
    } else {
        log << fmt::format("quenched={} t={} x={} max_ut={} steps={}\n", q.quenched, q.t_quench,
                           q.x_quench, q.max_ut, q.steps_total);
    }
    return 0;
}

std::vector<ScanResultRow> scan_rows(const ExperimentConfig& cfg) {
    if (!cfg.scan) throw Error(ErrorCode::InvalidArgument, "no scan configured");
    cfg.validate();
    const std::vector<double> params = cfg.scan->values();
    std::vector<ScanResultRow> rows(params.size());
    RunOptions opt;
    opt.keep_snapshots = false;
    opt.scalar_stride = std::numeric_limits<long>::max();
    const auto count = static_cast<long>(params.size());
#pragma omp parallel for schedule(dynamic)
    for (long k = 0; k < count; ++k) {
        ScanResultRow& row = rows[k];
        row.param = params[k];
        ExperimentConfig c = cfg;
        c.scan.reset();
        switch (cfg.scan->axis) {
            case ScanSpec::Axis::A: c.a = row.param; break;
            case ScanSpec::Axis::P: c.p = row.param; break;
            case ScanSpec::Axis::Seed: c.seed = static_cast<std::uint64_t>(row.param); break;
        }
        try {
            const RunResult r = run_configured(c, opt);
            row.quenched = r.report.quenched;
            row.t_quench = r.report.t_quench;
            row.x_quench = r.report.x_quench;
        } catch (const Error& e) {
            row.error = e.code();
        } catch (const std::exception&) {
            row.error = ErrorCode::NumericalFailure;
        }
    }
    return rows;
}

void write_scan_rows_csv(std::ostream& os, const std::vector<ScanResultRow>& rows) {
    os << "param,quenched,t_quench,x_quench\n";
    for (const auto& r : rows) {
        if (r.error) os << fmt::format("{},false,nan,nan\n", r.param);
        else os << fmt::format("{},{},{},{}\n", r.param, r.quenched, r.t_quench, r.x_quench);
    }
}

int run_scan(const ExperimentConfig& cfg, std::ostream& log) {
    cfg.validate();
    ensure_dir(cfg.output_dir);
    const std::vector<ScanResultRow> rows = scan_rows(cfg);
    std::ostringstream csv;
    write_scan_rows_csv(csv, rows);

    nlohmann::ordered_json j = manifest(cfg);
    nlohmann::ordered_json failures = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
        if (r.error) failures.push_back({{"param", r.param}, {"error", std::string(to_string(*r.error))}});
    }
    j["failed_rows"] = failures;
    write_atomic(cfg.output_dir / "scan.csv", csv.str());
    write_atomic(cfg.output_dir / "manifest.json", j.dump(2) + "\n");
    log << fmt::format("scan {}: {} rows, {} failed\n", to_string(*cfg.scan), rows.size(), failures.size());
    return 0;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    try {
        const auto cfg = parse_config(argc, argv, out);
        if (!cfg) return 0;
        return cfg->scan ? run_scan(*cfg, out) : run_experiment(*cfg, out);
    } catch (const Error& e) {
        err << fmt::format("error [{}]: {}\n", to_string(e.code()), e.what());
        return exit_code(e.code());
    } catch (const std::exception& e) {
        err << fmt::format("error: {}\n", e.what());
        return 2;
    }
}

}  // namespace kawarada
