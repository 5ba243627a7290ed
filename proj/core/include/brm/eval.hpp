#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "brm/agent.hpp"
#include "brm/house.hpp"
#include "brm/relation_graph.hpp"
#include "brm/world.hpp"

namespace brm {

// ---------------------------------------------------------------------------
// Corpora

struct CorpusEntry {
  std::uint64_t seed = 0;
  World world;
  GroundTruthRelations truth;
};

/// A set of houses with cached navigation data and ground-truth relations.
struct Corpus {
  std::string id;
  ConceptVocabulary vocabulary;
  std::vector<CorpusEntry> entries;

  std::size_t size() const { return entries.size(); }
};

struct RelationSampling {
  int budget = 300;
  int trials = 50;
};

/// Seed of the ground-truth sampler for a house; shared by every tool so
/// relation graphs are reproducible from the house seed alone.
std::uint64_t truth_seed(std::uint64_t house_seed);

Corpus build_corpus(std::string id, std::span<const std::uint64_t> seeds, const HouseParams& params,
                    const RelationSampling& sampling = {});
Corpus build_corpus(std::string id, const ConceptVocabulary& vocabulary,
                    std::vector<std::pair<std::uint64_t, House>> houses,
                    const RelationSampling& sampling = {});

/// Default split layout: house seeds for train / valid / test.
struct CorpusSplits {
  std::vector<std::uint64_t> train;
  std::vector<std::uint64_t> valid;
  std::vector<std::uint64_t> test;
};
CorpusSplits default_splits(std::uint64_t global_seed, int train = 200, int valid = 20, int test = 50);

// ---------------------------------------------------------------------------
// Metrics

struct SplSample {
  bool success = false;
  double shortest = 0.0;  // L
  double taken = 0.0;     // P
};

/// Success weighted by path length: mean of S * L / max(L, P).
double spl(std::span<const SplSample> results);

inline constexpr int kMaxPlanBucket = 5;  // buckets above 5 merge into "5+"

struct BucketMetrics {
  int plan_steps = 0;  // 0 for the overall row
  int n = 0;
  double success_rate = 0.0;
  double spl = 0.0;
  double mean_steps = 0.0;  // over successful episodes
};

struct DistanceBucket {
  int min_shortest = 0;
  int max_shortest = 0;
  int n = 0;
  double success_rate = 0.0;
  double spl = 0.0;
};

struct EpisodeRecord {
  std::uint64_t episode_seed = 0;
  int plan_steps = 0;
  bool success = false;
  int steps = 0;
  int shortest = 0;
  double spl_term = 0.0;
};

struct ReportMeta {
  std::string mode;
  std::string termination;
  std::string corpus;
  int horizon = 0;
  int replan_period = 0;
  std::string locomotion;
};

struct MetricsReport {
  ReportMeta meta;
  std::vector<BucketMetrics> buckets;  // plan steps 1..5
  BucketMetrics overall;
  std::vector<DistanceBucket> distance_buckets;  // by shortest path, near to far
  std::vector<EpisodeRecord> episodes;

  std::string to_json() const;
  std::string to_csv() const;
};

/// Folds per-episode records into a report. Distance buckets are the
/// quintiles of the shortest-path lengths in `records`.
MetricsReport aggregate(const ReportMeta& meta, std::span<const EpisodeRecord> records);

// ---------------------------------------------------------------------------
// Suites

struct SuiteParams {
  int episodes_total = 1000;
  int min_per_bucket = 50;
  int max_attempts = 200000;
  std::uint64_t seed = 0;
  RelationSampling sampling;
};

struct EvalSuite {
  std::string corpus_id;
  std::vector<EpisodeConfig> episodes;
  std::vector<int> short_buckets;  // plan-distance buckets left below min_per_bucket
};

/// Random episodes (start never in a target room, target reachable) topped
/// up with targeted draws until each achievable bucket 1..5 holds
/// min_per_bucket episodes.
EvalSuite build_eval_suite(const Corpus& corpus, const SuiteParams& params);

// ---------------------------------------------------------------------------
// Running

struct RunSettings {
  DetectorModel detector;
  LocomotionSpec locomotion;
  int jobs = 1;
};

/// Runs every episode of the suite for one agent. Results do not depend on
/// the number of jobs.
std::vector<EpisodeResult> run_suite(const Corpus& corpus, const EvalSuite& suite,
                                     const AgentConfig& agent, const RelationGraph& graph,
                                     const RunSettings& settings);

MetricsReport run_benchmark(const Corpus& corpus, const EvalSuite& suite, const AgentConfig& agent,
                            const RelationGraph& graph, const RunSettings& settings);

std::vector<EpisodeRecord> to_records(const EvalSuite& suite, std::span<const EpisodeResult> results);

// ---------------------------------------------------------------------------
// Learning

/// Pools reachability samples over all houses and fits the prior.
PairTable<double> learn_prior_driver(const Corpus& train, const RelationSampling& sampling = {},
                                     double clamp = 0.01);
PairTable<BernoulliTally> collect_relation_samples(const Corpus& train, const RelationSampling& sampling);

struct GridPoint {
  ObservationNoise noise;
  double success_rate = 0.0;
  double spl = 0.0;
};

struct GridSearchResult {
  ObservationNoise best;
  std::vector<GridPoint> table;
};

std::vector<ObservationNoise> default_noise_grid();

/// BRM success rate on the validation suite for each candidate channel.
/// Ties go to higher SPL, then to the smaller false-negative rate.
GridSearchResult grid_search_obs(const Corpus& valid, const EvalSuite& suite,
                                 std::span<const ObservationNoise> grid, const RelationGraph& prior_graph,
                                 const AgentConfig& agent, const RunSettings& settings);

}  // namespace brm
