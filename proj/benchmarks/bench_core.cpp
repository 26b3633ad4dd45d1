#include "heatmem/dynamics.hpp"
#include "heatmem/history.hpp"
#include "heatmem/initial_data.hpp"

#include <benchmark/benchmark.h>

using namespace heatmem;

namespace {

RunConfig bench_config(int nx, int ny)
{
    RunConfig c;
    c.grid.nx = nx;
    c.grid.ny = ny;
    c.initial.history = ProfileKind::saturating;
    return c;
}

void BM_AssembleOperator(benchmark::State& state)
{
    const Grid grid = build_grid(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
    for (auto _ : state)
        benchmark::DoNotOptimize(assemble_wentzell(grid, 1.0, 1.0, 0.5, 0.5));
}
BENCHMARK(BM_AssembleOperator)->Args({32, 17})->Args({64, 33})->Args({128, 65});

void BM_ImexStep(benchmark::State& state)
{
    const RunConfig c = bench_config(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
    const Problem p = build_problem(c);
    const ImexStepper stepper(p.grid, p.op.principal_form(), c.integration.dt);
    Field u = initial_field(p.grid, c.initial);
    ModeHistory h = init_modes(p.memory, initial_history(p.grid, c.initial, u));
    for (auto _ : state) {
        StepResult s = imex_step(stepper, p.memory, p.nonlinearity, u, h);
        u = std::move(s.u);
        h = std::move(s.modes);
    }
}
BENCHMARK(BM_ImexStep)->Args({32, 17})->Args({64, 33})->Args({128, 65});

void BM_DirectLoad(benchmark::State& state)
{
    const RunConfig c = bench_config(64, 33);
    const Problem p = build_problem(c);
    const Field u = initial_field(p.grid, c.initial);
    DirectHistory h = init_direct(p.memory, initial_history(p.grid, c.initial, u));
    for (int n = 0; n < state.range(0); ++n)
        h.append(u, c.integration.dt);
    for (auto _ : state)
        benchmark::DoNotOptimize(load_form(p.memory, h));
}
BENCHMARK(BM_DirectLoad)->Arg(100)->Arg(1000)->Arg(10000);

void BM_ModeLoad(benchmark::State& state)
{
    const RunConfig c = bench_config(64, 33);
    const Problem p = build_problem(c);
    const Field u = initial_field(p.grid, c.initial);
    const ModeHistory h = init_modes(p.memory, initial_history(p.grid, c.initial, u));
    for (auto _ : state)
        benchmark::DoNotOptimize(load_form(p.memory, h));
}
BENCHMARK(BM_ModeLoad);

}  // namespace

BENCHMARK_MAIN();
