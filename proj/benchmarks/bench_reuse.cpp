#include <benchmark/benchmark.h>

#include <random>

#include "dmc/reuse.hpp"
#include "dmc/tracegen.hpp"

namespace {

dmc::Trace random_trace(std::int64_t n_accesses, dmc::ObjectId n_objects,
                        std::uint64_t size) {
  std::vector<dmc::DataObject> objects;
  for (dmc::ObjectId i = 0; i < n_objects; ++i)
    objects.push_back({i, "o" + std::to_string(i), size});
  std::mt19937_64 rng(42);
  std::uniform_int_distribution<dmc::ObjectId> obj(0, n_objects - 1);
  std::uniform_int_distribution<std::uint64_t> off(0, size - 1);
  std::vector<dmc::Access> accesses;
  accesses.reserve(static_cast<std::size_t>(n_accesses));
  for (std::int64_t i = 0; i < n_accesses; ++i)
    accesses.push_back({obj(rng), off(rng)});
  return dmc::Trace(std::move(objects), std::move(accesses));
}

void BM_FastEngineRandom(benchmark::State& state) {
  const auto trace = random_trace(state.range(0), 64, 256);
  for (auto _ : state)
    benchmark::DoNotOptimize(dmc::stack_distances_fast(trace));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FastEngineRandom)->RangeMultiplier(10)->Range(1'000, 1'000'000);

void BM_OracleRandom(benchmark::State& state) {
  const auto trace = random_trace(state.range(0), 64, 256);
  for (auto _ : state)
    benchmark::DoNotOptimize(dmc::stack_distances_oracle(trace));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_OracleRandom)->RangeMultiplier(10)->Range(1'000, 100'000);

void BM_AnalyzeConv(benchmark::State& state) {
  const auto trace = dmc::gen_conv(state.range(0), state.range(0), 3);
  dmc::AnalysisConfig config;
  for (auto _ : state) benchmark::DoNotOptimize(dmc::analyze(trace, config));
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(trace.size()));
}
BENCHMARK(BM_AnalyzeConv)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_AnalyzeConvBlocked(benchmark::State& state) {
  const auto trace = dmc::gen_conv(128, 128, 3);
  dmc::AnalysisConfig config;
  config.block_size = state.range(0);
  for (auto _ : state) benchmark::DoNotOptimize(dmc::analyze(trace, config));
}
BENCHMARK(BM_AnalyzeConvBlocked)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
