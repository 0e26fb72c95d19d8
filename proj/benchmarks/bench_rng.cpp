#include <benchmark/benchmark.h>

#include "rrmc/pcg.hpp"
#include "rrmc/sampling.hpp"

namespace {

using namespace rrmc;

void BM_Next(benchmark::State& state) {
  ReversiblePcg64 gen(42, StreamId{54});
  for (auto _ : state) benchmark::DoNotOptimize(gen.next());
}
BENCHMARK(BM_Next);

void BM_Prev(benchmark::State& state) {
  ReversiblePcg64 gen(42, StreamId{54});
  for (auto _ : state) benchmark::DoNotOptimize(gen.prev());
}
BENCHMARK(BM_Prev);

template <Direction D>
void BM_Uniform(benchmark::State& state) {
  ReversiblePcg64 gen(1, StreamId{0});
  for (auto _ : state) benchmark::DoNotOptimize(sample_uniform(gen, D));
}
BENCHMARK(BM_Uniform<Direction::Forward>)->Name("BM_Uniform/forward");
BENCHMARK(BM_Uniform<Direction::Reverse>)->Name("BM_Uniform/reverse");

template <Direction D>
void BM_Exponential(benchmark::State& state) {
  ReversiblePcg64 gen(1, StreamId{0});
  for (auto _ : state) benchmark::DoNotOptimize(sample_exponential(gen, D, 2.5));
}
BENCHMARK(BM_Exponential<Direction::Forward>)->Name("BM_Exponential/forward");
BENCHMARK(BM_Exponential<Direction::Reverse>)->Name("BM_Exponential/reverse");

template <Direction D>
void BM_Normal(benchmark::State& state) {
  ReversiblePcg64 gen(1, StreamId{0});
  const auto& table = ZigguratTable::standard();
  for (auto _ : state) benchmark::DoNotOptimize(sample_normal(gen, D, table));
}
BENCHMARK(BM_Normal<Direction::Forward>)->Name("BM_Normal/forward");
BENCHMARK(BM_Normal<Direction::Reverse>)->Name("BM_Normal/reverse");

void BM_ZigguratTable(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(ZigguratTable(128));
}
BENCHMARK(BM_ZigguratTable)->Unit(benchmark::kMicrosecond);

}  // namespace
