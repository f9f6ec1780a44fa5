#include "softrec/rng.hpp"
#include "softrec/statdim.hpp"

#include <benchmark/benchmark.h>

using namespace softrec;

namespace {

void BM_project_soft_slice(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(11);
  RealVec sv(1);
  sv << 1.0;
  const SoftCone cone{1.5, 0.5, sv, n, n};
  const RealMat u = rng.gaussian_matrix(n, n);
  for (auto _ : state)
    benchmark::DoNotOptimize(project_soft_slice(u, 1.0, cone, 1e-9, 20000).point.norm());
}
BENCHMARK(BM_project_soft_slice)->Arg(10)->Arg(30);

void BM_statdim_sample(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  RealVec sv(1);
  sv << 1.0;
  const SoftCone cone{1.5, 0.5, sv, n, n};
  std::uint64_t seed = 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(estimate_statdim(ConeSpec(cone), 2, ++seed).delta_hat);
}
BENCHMARK(BM_statdim_sample)->Arg(10)->Arg(30);

}  // namespace
