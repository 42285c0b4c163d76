#include <benchmark/benchmark.h>

#include "fluxfsp/generator.hpp"
#include "fluxfsp/network.hpp"
#include "fluxfsp/state_set.hpp"

namespace {

using namespace fluxfsp;

StateSet grow(const Model& m, std::size_t n) {
  StateSet s(m.network.num_species());
  s.insert(m.initial_state);
  while (s.size() < n) {
    const std::size_t before = s.size();
    s = expand(std::move(s), m.network, 1);
    if (s.size() == before) break;
  }
  return s;
}

void BM_ForwardAssembly(benchmark::State& st) {
  const Model m = builtin_model("robertson");
  const StateSet s = grow(m, static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) {
    benchmark::DoNotOptimize(assemble(s, m.network, GeneratorMode::Compressed));
  }
  st.counters["states"] = static_cast<double>(s.size());
}
BENCHMARK(BM_ForwardAssembly)->Arg(100)->Arg(1400)->Arg(20000)->Unit(benchmark::kMicrosecond);

void BM_AllPairsAssembly(benchmark::State& st) {
  const Model m = builtin_model("robertson");
  const StateSet s = grow(m, static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) {
    benchmark::DoNotOptimize(assemble_all_pairs(s, m.network, GeneratorMode::Compressed));
  }
  st.counters["states"] = static_cast<double>(s.size());
}
BENCHMARK(BM_AllPairsAssembly)->Arg(100)->Arg(1400)->Unit(benchmark::kMicrosecond);

void BM_Expand(benchmark::State& st) {
  const Model m = builtin_model("toggle");
  const StateSet s = grow(m, static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(expand(s, m.network, 1));
}
BENCHMARK(BM_Expand)->Arg(1000)->Arg(10000)->Unit(benchmark::kMicrosecond);

}  // namespace
