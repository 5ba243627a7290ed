#include <benchmark/benchmark.h>

#include "brm/eval.hpp"

namespace {

using namespace brm;

struct Setup {
  Corpus corpus;
  EvalSuite suite;
  RelationGraph graph{ConceptVocabulary{}};

  Setup() {
    const auto splits = default_splits(11, 0, 0, 4);
    corpus = build_corpus("bench", splits.test, HouseParams{});
    SuiteParams sp;
    sp.episodes_total = 64;
    sp.min_per_bucket = 1;
    suite = build_eval_suite(corpus, sp);
  }
};

const Setup& setup() {
  static const Setup s;
  return s;
}

void BM_Episode(benchmark::State& state) {
  const Setup& s = setup();
  AgentConfig agent;
  agent.mode = static_cast<AgentMode>(state.range(0));
  std::size_t i = 0;
  for (auto _ : state) {
    const EpisodeConfig& ep = s.suite.episodes[i++ % s.suite.episodes.size()];
    const CorpusEntry& entry = s.corpus.entries[static_cast<std::size_t>(ep.house_index)];
    const EpisodeContext ctx{entry.world, &entry.truth, DetectorModel{}, LocomotionSpec{}};
    benchmark::DoNotOptimize(run_episode(ctx, ep, agent, s.graph));
  }
}
BENCHMARK(BM_Episode)
    ->Arg(static_cast<int>(AgentMode::kBrm))
    ->Arg(static_cast<int>(AgentMode::kPure))
    ->Arg(static_cast<int>(AgentMode::kRandom))
    ->Unit(benchmark::kMillisecond);

void BM_GenerateHouse(benchmark::State& state) {
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(generate_house(seed++, HouseParams{}));
  }
}
BENCHMARK(BM_GenerateHouse);

}  // namespace

BENCHMARK_MAIN();
