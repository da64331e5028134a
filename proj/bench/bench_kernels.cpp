// Serial versus OpenMP kernels, plus the per-node reference path.
#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "effham/hamiltonian.hpp"
#include "effham/kernels.hpp"
#include "effham/numflux.hpp"
#include "effham/operators.hpp"

namespace {

using namespace effham;

PeriodicGrid barles_grid(std::size_t nx) {
    return PeriodicGrid({{nx, 1.0}, {nx / 4, 0.25}});
}

std::vector<double> field(const PeriodicGrid& g) {
    std::vector<double> w(g.size());
    for (std::size_t l = 0; l < g.size(); ++l)
        w[l] = std::sin(6.28318 * g.coordinate(l, 0)) * std::cos(25.13 * g.coordinate(l, 1));
    return w;
}

void run_levelset(benchmark::State& state, Exec exec, Scheme scheme) {
    const auto H = builtin("first_case");
    const auto g = barles_grid(static_cast<std::size_t>(state.range(0)));
    LevelSetOperator op(make_flux(H, FluxKind::godunov), {1.3, -1.0}, g);
    Marcher m(op, scheme, exec);
    auto w = field(g);
    const double dt = 0.5 * m.max_dt();
    for (auto _ : state) {
        m.step(0.0, w, dt);
        benchmark::DoNotOptimize(w.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(g.size()));
}

void BM_EulerSerial(benchmark::State& s) { run_levelset(s, Exec::serial, Scheme::explicit_euler); }
void BM_EulerParallel(benchmark::State& s) { run_levelset(s, Exec::parallel, Scheme::explicit_euler); }
void BM_Rk3WenoSerial(benchmark::State& s) { run_levelset(s, Exec::serial, Scheme::rk3_weno5); }
void BM_Rk3WenoParallel(benchmark::State& s) { run_levelset(s, Exec::parallel, Scheme::rk3_weno5); }

void BM_ReferenceOperator(benchmark::State& state) {
    const auto H = builtin("first_case");
    const auto g = barles_grid(static_cast<std::size_t>(state.range(0)));
    LevelSetOperator op(make_flux(H, FluxKind::godunov), {1.3, -1.0}, g);
    const auto w = field(g);
    std::vector<double> s(g.size());
    for (auto _ : state) {
        for (std::size_t l = 0; l < g.size(); ++l) s[l] = op.evaluate_node(0.0, w, l);
        benchmark::DoNotOptimize(s.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(g.size()));
}

void BM_GraphOperatorSerial(benchmark::State& state, Exec exec) {
    const auto H = builtin("first_case");
    const PeriodicGrid g({{static_cast<std::size_t>(state.range(0)), 5.0}});
    GraphOperator op(H, {1.3}, 1.0, g, FluxKind::godunov);
    Marcher m(op, Scheme::explicit_euler, exec);
    std::vector<double> w(g.size(), 0.0);
    for (auto _ : state) {
        m.step(0.0, w, m.max_dt());
        benchmark::DoNotOptimize(w.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(g.size()));
}

void BM_GraphSerial(benchmark::State& s) { BM_GraphOperatorSerial(s, Exec::serial); }
void BM_GraphParallel(benchmark::State& s) { BM_GraphOperatorSerial(s, Exec::parallel); }

}  // namespace

BENCHMARK(BM_EulerSerial)->Arg(200)->Arg(400);
BENCHMARK(BM_EulerParallel)->Arg(200)->Arg(400);
BENCHMARK(BM_Rk3WenoSerial)->Arg(200)->Arg(400);
BENCHMARK(BM_Rk3WenoParallel)->Arg(200)->Arg(400);
BENCHMARK(BM_ReferenceOperator)->Arg(200)->Arg(400);
BENCHMARK(BM_GraphSerial)->Arg(2000);
BENCHMARK(BM_GraphParallel)->Arg(2000);

BENCHMARK_MAIN();
