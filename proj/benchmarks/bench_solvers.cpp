#include "softrec/rng.hpp"
#include "softrec/solvers.hpp"

#include <benchmark/benchmark.h>

using namespace softrec;

namespace {

EqualityConstrainedProblem random_l1_problem(int m, int n, std::uint64_t seed) {
  Rng rng(seed);
  EqualityConstrainedProblem problem;
  problem.op = Mat(m, n);
  for (int j = 0; j < n; ++j) problem.op.col(j) = rng.cgaussian_vector(m);
  Vec sparse = Vec::Zero(n);
  for (int k = 0; k < m / 4 + 1; ++k)
    sparse[rng.uniform_index(n)] = rng.cgaussian();
  problem.rhs = problem.op * sparse;
  problem.regularizer = L1Reg{};
  return problem;
}

void BM_solve_l1(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const auto problem = random_l1_problem(m, 4 * m, 42);
  for (auto _ : state) {
    const SolveResult result = solve_equality_constrained(problem, 1e-8, 20000);
    benchmark::DoNotOptimize(result.objective);
  }
}
BENCHMARK(BM_solve_l1)->Arg(16)->Arg(64)->Arg(128);

void BM_prox_nuclear(benchmark::State& state) {
  Rng rng(7);
  const int n = static_cast<int>(state.range(0));
  const Mat x = rng.cgaussian_vector(n * n).reshaped(n, n);
  for (auto _ : state) benchmark::DoNotOptimize(prox_nuclear(x, 0.3).norm());
}
BENCHMARK(BM_prox_nuclear)->Arg(16)->Arg(64);

void BM_dense_svd(benchmark::State& state) {
  Rng rng(9);
  const int n = static_cast<int>(state.range(0));
  const RealMat x = rng.gaussian_matrix(n, n);
  for (auto _ : state) benchmark::DoNotOptimize(dense_svd(x).s.sum());
}
BENCHMARK(BM_dense_svd)->Arg(10)->Arg(30)->Arg(100);

}  // namespace
