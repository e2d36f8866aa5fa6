#include <benchmark/benchmark.h>

#include <cmath>

#include "sublab/dp.hpp"
#include "sublab/g_heat.hpp"
#include "sublab/path_functional.hpp"
#include "sublab/tree_oracle.hpp"

using namespace sublab;

namespace {

void BM_HeatSolve(benchmark::State& state) {
    const double dx = 1.0 / static_cast<double>(state.range(0));
    const TestFunction phi = TestFunction::positive_part_clipped(8.0);
    const HeatSolveConfig cfg{Grid::symmetric(15.0, dx), 0.5};
    const GCoefficients g(0.25, 1.0);
    for (auto _ : state) benchmark::DoNotOptimize(g_normal_expect(phi, 1.0, g, cfg));
}
BENCHMARK(BM_HeatSolve)->Arg(25)->Arg(50);

void BM_SumBackwardInduction(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const DistributionFamily fam{StepDistribution::rademacher(0.5 / std::sqrt(n)),
                                 StepDistribution::rademacher(1.0 / std::sqrt(n))};
    const KernelArray arr = KernelArray::iid(n, fam);
    const TestFunction phi = TestFunction::positive_part_clipped(8.0);
    const Grid grid = Grid::symmetric(std::sqrt(n) + 1.0, 1.0 / 64);
    for (auto _ : state) benchmark::DoNotOptimize(dp_sum_expect(arr, phi, grid));
}
BENCHMARK(BM_SumBackwardInduction)->Arg(16)->Arg(64);

void BM_RunningMax(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const DistributionFamily fam{StepDistribution::rademacher(0.5 / std::sqrt(n)),
                                 StepDistribution::rademacher(1.0 / std::sqrt(n))};
    const KernelArray arr = KernelArray::iid(n, fam);
    const PathFunctional f = PathFunctional::running_max(TestFunction::identity_clipped(8.0));
    const Grid grid = Grid::symmetric(std::sqrt(n) + 1.0, 1.0 / 32);
    for (auto _ : state) benchmark::DoNotOptimize(dp_path_expect(arr, f, grid));
}
BENCHMARK(BM_RunningMax)->Arg(16)->Arg(32);

void BM_TreeOracle(benchmark::State& state) {
    const DistributionFamily fam{StepDistribution::rademacher(0.5),
                                 StepDistribution::rademacher(1.0)};
    const KernelArray arr = KernelArray::iid(static_cast<int>(state.range(0)), fam);
    const TestFunction phi = TestFunction::clipped_power(2, 16.0);
    for (auto _ : state)
        benchmark::DoNotOptimize(tree_expect_exact(arr, PathFunctional::terminal(phi)));
}
BENCHMARK(BM_TreeOracle)->Arg(6)->Arg(8);

} // namespace

BENCHMARK_MAIN();
