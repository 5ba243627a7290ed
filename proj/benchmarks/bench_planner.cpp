#include <benchmark/benchmark.h>

#include "brm/relation_graph.hpp"
#include "brm/rng.hpp"

namespace {

using namespace brm;

void BM_Plan(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(2);
  PairTable<double> p(n);
  for (auto& v : p) v = uniform_real(rng, 0.01, 0.99);
  const auto current = SemanticVector::from_raw(n - 1, 1U);
  for (auto _ : state) {
    benchmark::DoNotOptimize(plan(p, current, n - 2));
  }
}
BENCHMARK(BM_Plan)->Arg(4)->Arg(9)->Arg(16)->Arg(32);

}  // namespace
