// Serial reference vs OpenMP kernels for the 2-D LOD sweeps and source evaluation.

#include "kawarada/lod.hpp"

#include <benchmark/benchmark.h>

#include <vector>

using namespace kawarada;

namespace {

struct Fixture {
    Grid2D grid;
    LodOperator op;
    SourceModel model;
    std::vector<double> v, pre, post, out;

    explicit Fixture(std::size_t n)
        : grid{make_uniform_grid(n), make_uniform_grid(n)},
          op(make_lod_operator(grid, std::vector<double>(grid.size(), 1.0), 2.0, 2.0)),
          model(make_source(phi_squared(sample_noise(grid.size(), NoiseSpec{1})),
                            std::vector<double>(grid.size(), 1.0))),
          v(default_u0_2d(grid)),
          pre(grid.size(), 1e-4),
          post(grid.size(), 1e-4),
          out(grid.size()) {}
};

template <bool Parallel>
void sweep(benchmark::State& state) {
    Fixture f(static_cast<std::size_t>(state.range(0)));
    const double tau = 0.5 * f.op.ceiling;
    for (auto _ : state) {
        for (Axis axis : {Axis::X, Axis::Y}) {
            if constexpr (Parallel) lod_sweep_omp(f.op, axis, tau, f.v, f.pre, f.post, f.out);
            else lod_sweep_serial(f.op, axis, tau, f.v, f.pre, f.post, f.out);
        }
        benchmark::DoNotOptimize(f.out.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(f.grid.size()));
}

template <bool Parallel>
void source(benchmark::State& state) {
    Fixture f(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        const double g = Parallel ? g_eval_omp(f.v, f.model, f.out) : g_eval_serial(f.v, f.model, f.out);
        benchmark::DoNotOptimize(g);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(f.grid.size()));
}

}  // namespace

BENCHMARK(sweep<false>)->Name("lod_sweep/serial")->Arg(81)->Arg(161)->Arg(401);
BENCHMARK(sweep<true>)->Name("lod_sweep/omp")->Arg(81)->Arg(161)->Arg(401);
BENCHMARK(source<false>)->Name("g_eval/serial")->Arg(81)->Arg(161)->Arg(401);
BENCHMARK(source<true>)->Name("g_eval/omp")->Arg(81)->Arg(161)->Arg(401);

BENCHMARK_MAIN();
