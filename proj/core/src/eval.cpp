#include "brm/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json_util.hpp"

namespace brm {

std::uint64_t truth_seed(std::uint64_t house_seed) { return derive_seed(house_seed, 0x7472757468ULL); }

Corpus build_corpus(std::string id, std::span<const std::uint64_t> seeds, const HouseParams& params,
                    const RelationSampling& sampling) {
  std::vector<std::pair<std::uint64_t, House>> houses;
  houses.reserve(seeds.size());
  for (auto seed : seeds) houses.emplace_back(seed, generate_house(seed, params));
  return build_corpus(std::move(id), params.vocabulary, std::move(houses), sampling);
}

Corpus build_corpus(std::string id, const ConceptVocabulary& vocabulary,
                    std::vector<std::pair<std::uint64_t, House>> houses, const RelationSampling& sampling) {
  Corpus corpus{std::move(id), vocabulary, {}};
  corpus.entries.reserve(houses.size());
  const int k = vocabulary.concept_count();
  for (auto& [seed, house] : houses) {
    auto truth = ground_truth_relations(house, k, sampling.budget, sampling.trials, truth_seed(seed));
    corpus.entries.push_back({seed, World(std::move(house), k), std::move(truth)});
  }
  return corpus;
}

CorpusSplits default_splits(std::uint64_t global_seed, int train, int valid, int test) {
  CorpusSplits s;
  const std::uint64_t base = global_seed * 100000;
  for (int i = 0; i < train; ++i) s.train.push_back(base + static_cast<std::uint64_t>(i));
  for (int i = 0; i < valid; ++i) s.valid.push_back(base + 10000 + static_cast<std::uint64_t>(i));
  for (int i = 0; i < test; ++i) s.test.push_back(base + 20000 + static_cast<std::uint64_t>(i));
  return s;
}

double spl(std::span<const SplSample> results) {
  if (results.empty()) throw std::invalid_argument("no episodes");
  double sum = 0.0;
  for (const auto& r : results) {
    if (!(r.shortest > 0.0) || r.taken < 0.0) throw std::invalid_argument("SPL needs L > 0 and P >= 0");
    if (r.success) sum += r.shortest / std::max(r.shortest, r.taken);
  }
  return sum / static_cast<double>(results.size());
}

namespace {

BucketMetrics summarize(int plan_steps, std::span<const EpisodeRecord* const> rows) {
  BucketMetrics m;
  m.plan_steps = plan_steps;
  m.n = static_cast<int>(rows.size());
  if (rows.empty()) return m;
  int successes = 0;
  double steps = 0.0;
  double spl_sum = 0.0;
  for (const auto* r : rows) {
    if (r->success) {
      ++successes;
      steps += r->steps;
    }
    spl_sum += r->spl_term;
  }
  m.success_rate = static_cast<double>(successes) / m.n;
  m.spl = spl_sum / m.n;
  m.mean_steps = successes > 0 ? steps / successes : 0.0;
  return m;
}

std::string format_fixed(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

nlohmann::ordered_json bucket_json(const BucketMetrics& m) {
  nlohmann::ordered_json j;
  if (m.plan_steps > 0) j["plan_steps"] = m.plan_steps;
  j["n"] = m.n;
  j["success_rate"] = m.success_rate;
  j["spl"] = m.spl;
  j["mean_steps"] = m.mean_steps;
  return j;
}

}  // namespace

MetricsReport aggregate(const ReportMeta& meta, std::span<const EpisodeRecord> records) {
  MetricsReport report;
  report.meta = meta;
  report.episodes.assign(records.begin(), records.end());

  std::vector<const EpisodeRecord*> all;
  std::vector<std::vector<const EpisodeRecord*>> by_bucket(kMaxPlanBucket);
  for (const auto& r : records) {
    all.push_back(&r);
    const int b = std::clamp(r.plan_steps, 1, kMaxPlanBucket);
    by_bucket[static_cast<std::size_t>(b - 1)].push_back(&r);
  }
  for (int b = 1; b <= kMaxPlanBucket; ++b) {
    report.buckets.push_back(summarize(b, by_bucket[static_cast<std::size_t>(b - 1)]));
  }
  report.overall = summarize(0, all);

  if (!records.empty()) {
    std::vector<int> lengths;
    for (const auto& r : records) lengths.push_back(r.shortest);
    std::sort(lengths.begin(), lengths.end());
    constexpr int kBins = 5;
    std::vector<int> lower;
    for (int b = 0; b < kBins; ++b) {
      const int v = lengths[lengths.size() * static_cast<std::size_t>(b) / kBins];
      if (lower.empty() || v > lower.back()) lower.push_back(v);
    }
    std::vector<std::vector<const EpisodeRecord*>> rows(lower.size());
    for (const auto& r : records) {
      std::size_t b = 0;
      while (b + 1 < lower.size() && r.shortest >= lower[b + 1]) ++b;
      rows[b].push_back(&r);
    }
    for (std::size_t b = 0; b < lower.size(); ++b) {
      const auto m = summarize(0, rows[b]);
      DistanceBucket d;
      d.min_shortest = lower[b];
      d.max_shortest = b + 1 < lower.size() ? lower[b + 1] - 1 : lengths.back();
      d.n = m.n;
      d.success_rate = m.success_rate;
      d.spl = m.spl;
      report.distance_buckets.push_back(d);
    }
  }
  return report;
}

std::string MetricsReport::to_json() const {
  nlohmann::ordered_json doc;
  auto& m = doc["meta"];
  m["mode"] = meta.mode;
  m["termination"] = meta.termination;
  m["corpus"] = meta.corpus;
  m["horizon"] = meta.horizon;
  m["replan_period"] = meta.replan_period;
  m["locomotion"] = meta.locomotion;
  auto buckets_json = nlohmann::ordered_json::array();
  for (const auto& b : buckets) buckets_json.push_back(bucket_json(b));
  doc["buckets"] = std::move(buckets_json);
  doc["overall"] = bucket_json(overall);
  auto dist = nlohmann::ordered_json::array();
  for (const auto& d : distance_buckets) {
    dist.push_back({{"min_L", d.min_shortest}, {"max_L", d.max_shortest}, {"n", d.n},
                    {"success_rate", d.success_rate}, {"spl", d.spl}});
  }
  doc["distance_buckets"] = std::move(dist);
  return doc.dump(2) + "\n";
}

std::string MetricsReport::to_csv() const {
  std::ostringstream out;
  out << "episode_seed,mode,plan_steps,success,steps,L,spl_term\n";
  for (const auto& e : episodes) {
    out << e.episode_seed << ',' << meta.mode << ',' << e.plan_steps << ',' << (e.success ? 1 : 0) << ','
        << e.steps << ',' << e.shortest << ',' << format_fixed(e.spl_term) << '\n';
  }
  return out.str();
}

EvalSuite build_eval_suite(const Corpus& corpus, const SuiteParams& params) {
  if (params.min_per_bucket < 1) throw std::invalid_argument("min_per_bucket must be >= 1");
  if (corpus.entries.empty()) throw std::invalid_argument("empty corpus");
  const int k = corpus.vocabulary.concept_count();
  Rng rng(derive_seed(params.seed, 0x7375697465ULL));
  EvalSuite suite;
  suite.corpus_id = corpus.id;
  std::uint64_t drawn = 0;

  const auto draw = [&]() -> std::optional<EpisodeConfig> {
    ++drawn;
    const auto idx = uniform_index(rng, corpus.entries.size());
    const auto& entry = corpus.entries[idx];
    const House& house = entry.world.house();
    std::vector<ConceptId> present;
    for (ConceptId c = 0; c < k; ++c) {
      if (house.has_concept(c)) present.push_back(c);
    }
    const ConceptId target = present[uniform_index(rng, present.size())];
    std::vector<int> starts;
    for (int i = 0; i < house.cell_count(); ++i) {
      if (house.is_walkable(i) && house.concept_at(i) != target && entry.world.distance(target, i) > 0) {
        starts.push_back(i);
      }
    }
    if (starts.empty()) return std::nullopt;
    const int start = starts[uniform_index(rng, starts.size())];
    const auto pd = plan_distance(entry.truth, SemanticVector::of(k, house.concept_at(start)), target);
    if (!pd) return std::nullopt;
    EpisodeConfig cfg;
    cfg.house_seed = entry.seed;
    cfg.house_index = static_cast<int>(idx);
    cfg.start = house.cell(start);
    cfg.target = target;
    cfg.rng_seed = derive_seed(params.seed, drawn);
    cfg.plan_distance = *pd;
    cfg.shortest_path = shortest_path_len(entry.world, start, target);
    return cfg;
  };

  while (static_cast<int>(suite.episodes.size()) < params.episodes_total &&
         drawn < static_cast<std::uint64_t>(params.max_attempts)) {
    if (auto cfg = draw()) suite.episodes.push_back(*cfg);
  }

  std::vector<int> counts(kMaxPlanBucket, 0);
  for (const auto& e : suite.episodes) ++counts[static_cast<std::size_t>(std::min(e.plan_distance, kMaxPlanBucket) - 1)];
  const auto deficient = [&] {
    return std::any_of(counts.begin(), counts.end(), [&](int c) { return c < params.min_per_bucket; });
  };
  while (deficient() && drawn < static_cast<std::uint64_t>(params.max_attempts)) {
    auto cfg = draw();
    if (!cfg) continue;
    auto& c = counts[static_cast<std::size_t>(std::min(cfg->plan_distance, kMaxPlanBucket) - 1)];
    if (c >= params.min_per_bucket) continue;
    ++c;
    suite.episodes.push_back(*cfg);
  }
  for (int b = 1; b <= kMaxPlanBucket; ++b) {
    if (counts[static_cast<std::size_t>(b - 1)] < params.min_per_bucket) suite.short_buckets.push_back(b);
  }
  return suite;
}

std::vector<EpisodeResult> run_suite(const Corpus& corpus, const EvalSuite& suite, const AgentConfig& agent,
                                     const RelationGraph& graph, const RunSettings& settings) {
  agent.validate();
  settings.detector.validate();
  settings.locomotion.validate();
  std::vector<EpisodeResult> results(suite.episodes.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  const auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= suite.episodes.size()) return;
      try {
        const auto& episode = suite.episodes[i];
        const auto& entry = corpus.entries.at(static_cast<std::size_t>(episode.house_index));
        EpisodeContext context{entry.world, &entry.truth, settings.detector, settings.locomotion};
        results[i] = run_episode(context, episode, agent, graph);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = suite.episodes.size();
      }
    }
  };

  const int jobs = std::max(1, settings.jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return results;
}

std::vector<EpisodeRecord> to_records(const EvalSuite& suite, std::span<const EpisodeResult> results) {
  std::vector<EpisodeRecord> records;
  records.reserve(results.size());
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    EpisodeRecord rec;
    rec.episode_seed = suite.episodes[i].rng_seed;
    rec.plan_steps = suite.episodes[i].plan_distance;
    rec.success = r.success;
    rec.steps = r.steps_taken;
    rec.shortest = r.shortest_path;
    const SplSample s{r.success, static_cast<double>(r.shortest_path), static_cast<double>(r.steps_taken)};
    rec.spl_term = spl(std::span(&s, 1));
    records.push_back(rec);
  }
  return records;
}

MetricsReport run_benchmark(const Corpus& corpus, const EvalSuite& suite, const AgentConfig& agent,
                            const RelationGraph& graph, const RunSettings& settings) {
  const auto results = run_suite(corpus, suite, agent, graph, settings);
  ReportMeta meta{std::string(to_string(agent.mode)), std::string(to_string(agent.termination)), corpus.id,
                  agent.horizon, agent.replan_period, std::string(to_string(settings.locomotion.kind))};
  const auto records = to_records(suite, results);
  return aggregate(meta, records);
}

PairTable<BernoulliTally> collect_relation_samples(const Corpus& train, const RelationSampling& sampling) {
  if (train.entries.empty()) throw std::invalid_argument("empty training corpus");
  const int k = train.vocabulary.concept_count();
  PairTable<BernoulliTally> pooled(k + 1);
  for (const auto& entry : train.entries) {
    // One z sample per house and pair: does the relation exist here.
    const GroundTruthRelations gt =
        ground_truth_relations(entry.world.house(), k, sampling.budget, sampling.trials, truth_seed(entry.seed));
    for (std::size_t i = 0; i < pooled.size(); ++i) pooled[i].add(gt.adjacency[i] != 0);
  }
  return pooled;
}

PairTable<double> learn_prior_driver(const Corpus& train, const RelationSampling& sampling, double clamp) {
  return learn_prior(collect_relation_samples(train, sampling), clamp);
}

std::vector<ObservationNoise> default_noise_grid() {
  std::vector<ObservationNoise> grid;
  for (double fp : {0.001, 0.01, 0.05, 0.1}) {
    for (double fn : {0.05, 0.15, 0.3, 0.45}) grid.push_back({fp, fn});
  }
  return grid;
}

GridSearchResult grid_search_obs(const Corpus& valid, const EvalSuite& suite,
                                 std::span<const ObservationNoise> grid, const RelationGraph& prior_graph,
                                 const AgentConfig& agent, const RunSettings& settings) {
  if (grid.empty()) throw std::invalid_argument("empty parameter grid");
  GridSearchResult result;
  const GridPoint* best = nullptr;
  for (const auto& noise : grid) {
    RelationGraph graph = prior_graph;
    graph.set_observation_noise(noise);
    const auto report = run_benchmark(valid, suite, agent, graph, settings);
    result.table.push_back({noise, report.overall.success_rate, report.overall.spl});
  }
  for (const auto& p : result.table) {
    if (best == nullptr || p.success_rate > best->success_rate ||
        (p.success_rate == best->success_rate &&
         (p.spl > best->spl || (p.spl == best->spl && p.noise.false_negative < best->noise.false_negative)))) {
      best = &p;
    }
  }
  result.best = best->noise;
  return result;
}

}  // namespace brm
