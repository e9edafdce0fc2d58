#pragma once

#include "kawarada/error.hpp"
#include "kawarada/solver.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace kawarada {

enum class Preset {
    Exp1Global,
    Exp1Quench,
    Exp1Scan,
    Exp2Degenerate,
    Exp2Sweep,
    Exp3Stochastic,
    Exp4TwoD,
    Custom,
};

std::string_view to_string(Preset p);
Preset parse_preset(std::string_view name);

enum class GridKind { Uniform, Parabolic };

std::string_view to_string(GridKind g);
GridKind parse_grid_kind(std::string_view name);

struct ScanSpec {
    enum class Axis { A, P, Seed };
    Axis axis = Axis::A;
    double lo = 0.0;
    double hi = 0.0;
    long count = 1;

    /// count points from lo to hi inclusive; seeds are rounded to integers.
    std::vector<double> values() const;
};

/// "<axis>:<lo>:<hi>:<count>" with axis in {a, p, seed}.
ScanSpec parse_scan(std::string_view text);
std::string to_string(const ScanSpec& s);

struct ExperimentConfig {
    Preset preset = Preset::Custom;
    int dim = 1;
    double a = 2.0;
    double b = 2.0;
    double theta = 1.0;
    std::optional<double> p;               // none: sigma == 1
    long n_interior = 201;                 // per axis in 2-D
    GridKind grid = GridKind::Parabolic;
    double refinement_ratio = 4.0;
    std::optional<std::uint64_t> seed;     // none: phi == 1
    double t_end = 5.0;
    double trigger_level = 0.9;
    double tau_base = 0.0;                 // 0 selects safety * ceiling
    double tau_min_c = 1.0;
    long stride = 10;                      // scalar history stride before the trigger
    long tail = 105;                       // full states kept before the end
    std::filesystem::path output_dir = "out";
    std::optional<ScanSpec> scan;

    /// Throws Error(InvalidArgument) naming the offending field.
    void validate() const;
    StepConfig step_config() const;
};

ExperimentConfig preset_defaults(Preset p);

/// Applies `key = value` lines; `#` starts a comment. Keys match the long
/// flag names with '-' replaced by '_'. Unknown keys and malformed lines raise
/// Error(Usage). Returns the keys that were set.
std::set<std::string> apply_config_text(ExperimentConfig& cfg, std::istream& in);

/// Sets one field from its textual value; throws Error(Usage) for unknown keys
/// or unparsable values.
void set_field(ExperimentConfig& cfg, std::string_view key, std::string_view value);

/// Precedence: flags > config file > preset defaults. Throws Error(Usage) on
/// malformed input and Error(InvalidArgument) on out-of-range values.
/// Returns nullopt when help was requested (text written to `out`).
std::optional<ExperimentConfig> parse_config(int argc, const char* const* argv, std::ostream& out);

/// Process exit code for an error category: 2 numerical, 3 config, 4 I/O.
int exit_code(ErrorCode c);

struct ScanResultRow {
    double param = 0.0;
    bool quenched = false;
    double t_quench = 0.0;
    double x_quench = 0.0;
    std::optional<ErrorCode> error;
};

Problem1D build_problem_1d(const ExperimentConfig& cfg);

/// Runs the configured problem (1-D or 2-D) without writing anything.
RunResult run_configured(const ExperimentConfig& cfg, const RunOptions& options);

/// Writes report.csv, history.csv, snapshots.csv, manifest.json (and
/// noise.csv when seeded) into cfg.output_dir. Returns the exit code.
int run_experiment(const ExperimentConfig& cfg, std::ostream& log);

std::vector<ScanResultRow> scan_rows(const ExperimentConfig& cfg);

/// `param,quenched,t_quench,x_quench`
void write_scan_rows_csv(std::ostream& os, const std::vector<ScanResultRow>& rows);

/// Writes scan.csv and manifest.json into cfg.output_dir. Returns the exit code.
int run_scan(const ExperimentConfig& cfg, std::ostream& log);

/// Entry point used by the executable: parse, dispatch, map errors to codes.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace kawarada
