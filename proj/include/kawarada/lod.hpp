#pragma once

#include "kawarada/grid.hpp"
#include "kawarada/solver.hpp"
#include "kawarada/source.hpp"
#include "kawarada/stepper.hpp"
#include "kawarada/tridiagonal.hpp"

#include <iosfwd>
#include <span>
#include <vector>

namespace kawarada {

/// sigma(x,y) u_t = (1/a^2) u_xx + (1/b^2) u_yy + phi f(u) on (-1,1)^2.
/// Fields are stored row-major with x fastest: index = j * nx + i.
struct Problem2D {
    Grid2D grid;
    SourceModel model;  // phi and sigma over all nx * ny interior nodes
    double a = 1.0;
    double b = 1.0;
    std::vector<double> u0;  // empty selects default_u0_2d(grid)
};

/// 0.001 (1 - cos 2 pi x)(1 - cos 2 pi y) at the interior nodes.
std::vector<double> default_u0_2d(const Grid2D& g);

/// Directional operators of the LOD splitting. Row j of the x-sweep uses
/// (1/a^2) diag(1/sigma(., y_j)) P_x; column i of the y-sweep uses
/// (1/b^2) diag(1/sigma(x_i, .)) P_y.
struct LodOperator {
    Tridiagonal px;
    Tridiagonal py;
    std::vector<double> inv_sigma;
    double inv_a2 = 1.0;
    double inv_b2 = 1.0;
    std::size_t nx = 0;
    std::size_t ny = 0;
    double ceiling = 0.0;  // min over both axes, clamped at 1

    /// out = M v = diag(1/sigma) ((1/a^2) P_x + (1/b^2) P_y) v
    void apply_m(std::span<const double> v, std::span<double> out) const;
};

LodOperator make_lod_operator(const Grid2D& g, std::span<const double> sigma, double a, double b);

enum class Axis { X, Y };

/// One LOD half-step along `axis`, applied line by line:
///   out = (I - tau/2 M_axis)^{-1} (I + tau/2 M_axis) (in + pre) + post
/// `pre` and `post` carry the source contributions attached to this sweep.
/// The serial version is the reference; the OpenMP version distributes lines
/// over threads and produces bit-identical results.
void lod_sweep_serial(const LodOperator& op, Axis axis, double tau, std::span<const double> in,
                      std::span<const double> pre, std::span<const double> post,
                      std::span<double> out);
void lod_sweep_omp(const LodOperator& op, Axis axis, double tau, std::span<const double> in,
                   std::span<const double> pre, std::span<const double> post,
                   std::span<double> out);

/// g(v) over the whole field; returns ||g(v)||_inf. Throws QuenchOverflow.
double g_eval_serial(std::span<const double> v, const SourceModel& model, std::span<double> out);
double g_eval_omp(std::span<const double> v, const SourceModel& model, std::span<double> out);

enum class Kernel { Serial, OpenMP };

/// Runs the 2-D problem with the same step control and quench logic as run_1d.
/// Each step: predictor w = v + tau (M v + g(v)), then an x-sweep and a y-sweep,
/// each adding tau/4 g(v) before and tau/4 g(w) after its propagation.
RunResult run_2d_lod(const Problem2D& problem, const StepConfig& cfg, double t_end,
                     const RunOptions& options = {}, Kernel kernel = Kernel::Serial);

/// `t,x,y,u` over all snapshots (interior nodes).
void write_snapshots_csv_2d(std::ostream& os, const RunHistory& h, const Grid2D& g);

}  // namespace kawarada
