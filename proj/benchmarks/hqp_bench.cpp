#include <random>

#include <benchmark/benchmark.h>

#include "random_problems.hpp"
#include "wbc/hqp.hpp"

namespace {

void BM_SolveHierarchy(benchmark::State& state)
{
  std::mt19937 rng(3);
  const auto levels = wbc::test::random_wbc_shaped_hierarchy(rng);
  for (auto _ : state)
    benchmark::DoNotOptimize(wbc::solve_hierarchy(levels, 30));
}
BENCHMARK(BM_SolveHierarchy)->Unit(benchmark::kMicrosecond);

void BM_SolveHierarchyWarm(benchmark::State& state)
{
  std::mt19937 rng(3);
  const auto levels = wbc::test::random_wbc_shaped_hierarchy(rng);
  wbc::HqpSolver solver;
  solver.solve(levels, 30);
  for (auto _ : state)
    benchmark::DoNotOptimize(solver.solve(levels, 30));
}
BENCHMARK(BM_SolveHierarchyWarm)->Unit(benchmark::kMicrosecond);

}  // namespace
