#include "softrec/superres.hpp"

#include <benchmark/benchmark.h>

using namespace softrec;

namespace {

void BM_grid_frame_build(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    const GridFrame frame(0.0, 1.0, n, GaussianFilter{0.05});
    benchmark::DoNotOptimize(frame.frame_size());
  }
}
BENCHMARK(BM_grid_frame_build)->Arg(128)->Arg(512);

void BM_cover_interval(benchmark::State& state) {
  const GridFrame frame(0.0, 1.0, 256, GaussianFilter{0.05});
  for (auto _ : state)
    benchmark::DoNotOptimize(cover_interval_frame_set(frame, 0.0, 1.0, 0.05).indices.size());
}
BENCHMARK(BM_cover_interval);

void BM_certificate_eval(benchmark::State& state) {
  const GridFrame frame(0.0, 1.0, 256, GaussianFilter{0.05});
  const CoverResult cover = cover_interval_frame_set(frame, 0.0, 1.0, 0.05);
  const SuperresCertificate cert =
      build_superres_certificate(frame, cover.indices, 0.5, Complex(1, 0), 0.06, 0.0, 0.5);
  double y = 0.0;
  for (auto _ : state) {
    y += 1e-4;
    benchmark::DoNotOptimize(cert.eval(0.2 + y));
  }
}
BENCHMARK(BM_certificate_eval);

}  // namespace
