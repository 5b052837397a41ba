#include <benchmark/benchmark.h>

#include "dmc/tracegen.hpp"

namespace {

void BM_GenMatmul(benchmark::State& state) {
  const std::int64_t s = state.range(0);
  for (auto _ : state) benchmark::DoNotOptimize(dmc::gen_matmul(s, s, s));
}
BENCHMARK(BM_GenMatmul)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_GenConv(benchmark::State& state) {
  const std::int64_t n = state.range(0);
  for (auto _ : state) benchmark::DoNotOptimize(dmc::gen_conv(n, n, 3));
}
BENCHMARK(BM_GenConv)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_GenFft(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(dmc::gen_fft(state.range(0)));
}
BENCHMARK(BM_GenFft)->Arg(1 << 10)->Arg(1 << 14)->Unit(benchmark::kMillisecond);

void BM_GenFftConv2d(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(dmc::gen_fft_conv2d(state.range(0)));
}
BENCHMARK(BM_GenFftConv2d)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace
