#include <benchmark/benchmark.h>

#include "brm/relation_graph.hpp"
#include "brm/rng.hpp"

namespace {

using namespace brm;

void BM_Posterior(benchmark::State& state) {
  Rng rng(1);
  std::vector<EdgeBelief> beliefs(1024);
  for (auto& b : beliefs) {
    b.params.psi_prior = uniform_real(rng, 0.01, 0.99);
    b.pos_count = static_cast<std::uint32_t>(uniform_index(rng, 50));
    b.neg_count = static_cast<std::uint32_t>(uniform_index(rng, 50));
  }
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(posterior(beliefs[i++ & 1023]));
  }
}
BENCHMARK(BM_Posterior);

void BM_GraphObserve(benchmark::State& state) {
  const ConceptVocabulary vocab;
  RelationGraph graph(vocab);
  const int k = vocab.concept_count();
  std::vector<RelationObservation> obs;
  for (int i = 0; i < k; ++i) {
    for (int j = i + 1; j < k; ++j) obs.push_back({i, j, (i + j) % 3 == 0});
  }
  for (auto _ : state) {
    graph.observe(obs);
    benchmark::DoNotOptimize(graph.posteriors());
  }
}
BENCHMARK(BM_GraphObserve);

}  // namespace
