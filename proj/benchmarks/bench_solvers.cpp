#include <benchmark/benchmark.h>

#include <cmath>

#include "orex/chebyshev.hpp"
#include "orex/functional.hpp"
#include "orex/generators.hpp"
#include "orex/global.hpp"
#include "orex/lp.hpp"
#include "orex/oracle.hpp"

using namespace orex;

namespace {

MultiFidelityProblem twin(Index n) {
  gen::TwinConfig cfg;
  cfg.n = n;
  cfg.m0 = n / 2;
  cfg.m1 = n / 4 + 1;
  cfg.z = n / 2;
  cfg.eps0 = 1.0;
  cfg.eps1 = 0.6;
  cfg.seed = 7;
  return gen::digital_twin(cfg);
}

}  // namespace

static void BM_ChebyshevCenter(benchmark::State& state) {
  const Index n = state.range(0);
  const MultiFidelityProblem p = twin(n);
  const CompoundOperators ops = lift(p);
  const Vector y = stack_observation(gen::consistent_data(p, 11, 0.8));
  for (auto _ : state) {
    benchmark::DoNotOptimize(chebyshev_center(ops, y).radius_sq_upper);
  }
  state.SetComplexityN(n);
}
BENCHMARK(BM_ChebyshevCenter)->RangeMultiplier(2)->Range(8, 64)->Complexity();

static void BM_SolveGlobal(benchmark::State& state) {
  const MultiFidelityProblem p = twin(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_global(p).gwce_sq);
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SolveGlobal)->RangeMultiplier(2)->Range(8, 64)->Complexity();

static void BM_SampledGwce(benchmark::State& state) {
  const MultiFidelityProblem p = twin(16);
  const GlobalSolution sol = solve_global(p);
  const CompoundOperators ops = lift(p);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        oracle::sampled_gwce(sol.map_matrix, ops, {state.range(0), 3}));
  }
}
BENCHMARK(BM_SampledGwce)->Arg(1000)->Arg(10000);

static void BM_WeightedL1(benchmark::State& state) {
  const Index m = state.range(0);
  functional::ApproximabilityLevel level;
  level.basis_eval = Matrix(3, m);
  for (Index j = 0; j < m; ++j) {
    const double x = double(j) / double(m - 1);
    level.basis_eval(0, j) = 1.0;
    level.basis_eval(1, j) = x;
    level.basis_eval(2, j) = x * x;
  }
  level.epsilon = 0.1;
  level.m_t = m;
  functional::FunctionalTarget target;
  target.b = Vector(3);
  target.b << 1.0, 0.4, 0.16;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        functional::estimate_weights({level}, target).gwce);
  }
  state.SetComplexityN(m);
}
BENCHMARK(BM_WeightedL1)->RangeMultiplier(2)->Range(8, 128)->Complexity();

BENCHMARK_MAIN();
