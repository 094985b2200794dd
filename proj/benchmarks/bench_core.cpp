#include <benchmark/benchmark.h>

#include "metastable/driving.hpp"
#include "metastable/markov.hpp"
#include "metastable/oseledets.hpp"
#include "metastable/transfer.hpp"

using namespace metastable;

namespace {

DrivingSystem bench_driving() {
    return DrivingSystem::rotation(golden_mean_angle(),
                                   {{0.0, {1.0, 0.0}}, {0.5, {0.2, 0.8}}});
}

void BM_UlamBuild(benchmark::State& state) {
    const int grid_n = static_cast<int>(state.range(0));
    auto map = PiecewiseLinearMap::paired_tent(0.02, 0.015);
    for (auto _ : state) {
        auto op = UlamOperator::build(map, grid_n);
        benchmark::DoNotOptimize(op.nnz());
    }
}
BENCHMARK(BM_UlamBuild)->Arg(1024)->Arg(4096)->Arg(16384);

void BM_UlamApply(benchmark::State& state) {
    const int grid_n = static_cast<int>(state.range(0));
    auto op = UlamOperator::build(PiecewiseLinearMap::paired_tent(0.02, 0.015),
                                  grid_n);
    std::vector<double> in(static_cast<std::size_t>(grid_n), 0.5);
    std::vector<double> out(in.size());
    for (auto _ : state) {
        op.apply_inplace(in, out);
        in.swap(out);
        benchmark::DoNotOptimize(in.data());
    }
    state.SetItemsProcessed(state.iterations() * op.nnz());
}
BENCHMARK(BM_UlamApply)->Arg(1024)->Arg(4096)->Arg(16384);

void BM_Pullback(benchmark::State& state) {
    DrivingSystem ds = bench_driving();
    CocycleOperators ops(ds, {MapFamily::paired_tent, 2}, 0.05, 1024);
    CocycleRun run;
    run.epsilon = 0.05;
    run.grid_n = 1024;
    run.horizon_N = static_cast<long>(state.range(0));
    run.horizon_cap = run.horizon_N;  // fixed depth, no doubling
    run.doubling_tol = 1e300;
    for (auto _ : state) {
        auto r = pullback_density(ops, run, 0);
        benchmark::DoNotOptimize(r.phi.values().data());
    }
}
BENCHMARK(BM_Pullback)->Arg(256)->Arg(1024);

void BM_BackwardProduct(benchmark::State& state) {
    DrivingSystem ds = bench_driving();
    EnvChain chain = EnvChain::two_state(ds, 0.01, 1, 0);
    const long n = state.range(0);
    for (auto _ : state) {
        Matrix p = backward_product(chain, 0, n);
        benchmark::DoNotOptimize(p.data().data());
    }
    state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_BackwardProduct)->Arg(1000)->Arg(10000);

}  // namespace

BENCHMARK_MAIN();
