#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "brm/concepts.hpp"
#include "brm/pair_table.hpp"

namespace brm {

/// Noisy channel P(y | z): false_positive = P(y=1 | z=0),
/// false_negative = P(y=0 | z=1).
struct ObservationNoise {
  double false_positive = 0.001;
  double false_negative = 0.15;

  friend bool operator==(const ObservationNoise&, const ObservationNoise&) = default;
};

struct EdgeParams {
  double psi_prior = 0.5;
  ObservationNoise noise;

  /// Throws std::invalid_argument unless every value is in (0, 1) and the
  /// channel is informative (false_positive + false_negative < 1).
  void validate() const;

  friend bool operator==(const EdgeParams&, const EdgeParams&) = default;
};

struct EdgeBelief {
  EdgeParams params;
  std::uint32_t pos_count = 0;
  std::uint32_t neg_count = 0;

  friend bool operator==(const EdgeBelief&, const EdgeBelief&) = default;
};

/// Posterior log-odds of z = 1 given the belief's counts.
double log_odds(const EdgeBelief& belief);

/// P(z = 1 | counts). Always strictly inside (0, 1).
double posterior(const EdgeBelief& belief);

/// Complete graph over the K+1 vocabulary nodes with one Bernoulli relation
/// per unordered pair.
class RelationGraph {
 public:
  explicit RelationGraph(ConceptVocabulary vocabulary, ObservationNoise noise = {},
                         double psi_prior = 0.5);
  RelationGraph(ConceptVocabulary vocabulary, const PairTable<double>& priors,
                ObservationNoise noise = {});

  const ConceptVocabulary& vocabulary() const { return vocabulary_; }
  int node_count() const { return edges_.node_count(); }
  std::size_t edge_count() const { return edges_.size(); }

  const EdgeBelief& edge(ConceptId i, ConceptId j) const { return edges_.at(i, j); }
  const PairTable<EdgeBelief>& edges() const { return edges_; }

  double posterior(ConceptId i, ConceptId j) const { return brm::posterior(edge(i, j)); }
  PairTable<double> posteriors() const;
  PairTable<double> priors() const;

  void set_priors(const PairTable<double>& priors);
  void set_observation_noise(ObservationNoise noise);
  void set_edge_params(ConceptId i, ConceptId j, const EdgeParams& params);
  /// Throws std::logic_error if edges disagree on the channel.
  ObservationNoise shared_observation_noise() const;

  /// In-place count accumulation. Throws on self-relations or ids out of range.
  void observe(std::span<const RelationObservation> observations);
  void reset_counts();
  void set_counts(ConceptId i, ConceptId j, std::uint32_t pos_count, std::uint32_t neg_count);

  friend bool operator==(const RelationGraph&, const RelationGraph&) = default;

 private:
  ConceptVocabulary vocabulary_;
  PairTable<EdgeBelief> edges_;
};

RelationGraph update(RelationGraph graph, std::span<const RelationObservation> observations);
RelationGraph reset_episode(RelationGraph graph);

struct Plan {
  std::vector<ConceptId> path;  // empty when the target is unreachable
  double score = 0.0;

  bool reachable() const { return !path.empty(); }
  friend bool operator==(const Plan&, const Plan&) = default;
};

/// Most probable simple path from any node set in `current` to `target`,
/// scoring a path by the product of its edge probabilities. Edges with
/// probability 0 are absent. Ties go to fewer hops, then the
/// lexicographically smallest node sequence.
Plan plan(const PairTable<double>& edge_probability, const SemanticVector& current,
          ConceptId target);
Plan plan(const RelationGraph& graph, const SemanticVector& current, ConceptId target);

/// First hop of the plan, or the target itself for a single-node plan.
ConceptId next_subgoal(const Plan& p);

struct BernoulliTally {
  std::uint64_t positives = 0;
  std::uint64_t total = 0;

  void add(bool sample) {
    positives += sample ? 1 : 0;
    ++total;
  }
  friend bool operator==(const BernoulliTally&, const BernoulliTally&) = default;
};

/// Bernoulli MLE per pair, clipped to [clamp, 1 - clamp].
PairTable<double> learn_prior(const PairTable<BernoulliTally>& samples, double clamp = 0.01);

/// Graph file. Counts are only written for debug dumps.
std::string serialize(const RelationGraph& graph, bool include_counts = false);
RelationGraph deserialize(std::string_view text);

}  // namespace brm
