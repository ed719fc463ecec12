#include <benchmark/benchmark.h>

#include "lcoc/config.hpp"
#include "lcoc/optimizer.hpp"

using namespace lcoc;

namespace {

Problem problem_for(int n) {
    RunConfig c = load_config(LCOC_DEMO_CONFIG);
    c.nx = c.ny = n;
    return build_problem(c);
}

void BM_Forward(benchmark::State& state, ForwardBackend backend) {
    const Problem p = problem_for(static_cast<int>(state.range(0)));
    const auto paths = sample_brownian(1, p.params.modes.n_modes(), p.grid);
    const auto controls = initial_controls(p.cost, p.bounds);
    for (auto _ : state) {
        benchmark::DoNotOptimize(solve_forward(backend, p.params, controls, paths, p.grid));
    }
}

void BM_Adjoint(benchmark::State& state) {
    const Problem p = problem_for(static_cast<int>(state.range(0)));
    const auto paths = sample_brownian(1, p.params.modes.n_modes(), p.grid);
    const auto controls = initial_controls(p.cost, p.bounds);
    const auto fwd = solve_forward_transformed(p.params, controls, paths, p.grid);
    for (auto _ : state) {
        benchmark::DoNotOptimize(solve_adjoint(fwd, controls, p.cost, p.params, paths, p.grid));
    }
}

void BM_FbsSweep(benchmark::State& state) {
    const Problem p = problem_for(static_cast<int>(state.range(0)));
    const auto paths = sample_brownian(1, p.params.modes.n_modes(), p.grid);
    FbsOptions opt;
    opt.max_iter = 1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(fbs_optimize(p.params, p.cost, p.bounds, paths, p.grid, opt));
    }
}

}  // namespace

BENCHMARK_CAPTURE(BM_Forward, em, ForwardBackend::euler_maruyama)->Arg(17)->Arg(33)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Forward, transformed, ForwardBackend::transformed)->Arg(17)->Arg(33)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Adjoint)->Arg(17)->Arg(33)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FbsSweep)->Arg(17)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
