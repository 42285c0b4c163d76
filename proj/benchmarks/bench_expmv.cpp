#include <benchmark/benchmark.h>

#include <vector>

#include "fluxfsp/expmv.hpp"
#include "fluxfsp/generator.hpp"
#include "fluxfsp/network.hpp"
#include "fluxfsp/state_set.hpp"

namespace {

using namespace fluxfsp;

void BM_ExpmvToggle(benchmark::State& st) {
  const Model m = builtin_model("toggle");
  StateSet s(m.network.num_species());
  s.insert(m.initial_state);
  s = expand(std::move(s), m.network, static_cast<int>(st.range(0)));
  const SparseGenerator a = assemble(s, m.network, GeneratorMode::Compressed);
  std::vector<double> p(s.size(), 0.0);
  p[0] = 1.0;
  ExpmvOptions opts;
  opts.tol = 1e-10;
  for (auto _ : st) benchmark::DoNotOptimize(expmv(a, p, 0.05, opts));
  st.counters["states"] = static_cast<double>(s.size());
}
BENCHMARK(BM_ExpmvToggle)->Arg(10)->Arg(30)->Unit(benchmark::kMillisecond);

}  // namespace
