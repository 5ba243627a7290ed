#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "brm/concepts.hpp"
#include "brm/house.hpp"
#include "brm/pair_table.hpp"
#include "brm/relation_graph.hpp"
#include "brm/rng.hpp"

namespace brm {

/// Parametric stand-in for a trained room classifier. Per step, the current
/// room's concept scores >= 0.9 with probability hit_rate and every other
/// concept independently with probability false_alarm_rate.
struct DetectorModel {
  double hit_rate = 0.95;
  double false_alarm_rate = 0.01;

  void validate() const;
  ConfidenceVector emit(const House& house, int cell, int concept_count, Rng& rng) const;
};

struct StepOutcome {
  int cell = 0;
  ConfidenceVector confidences;
};

/// Moves the agent (blocked moves keep it in place) and emits the detector
/// reading at the new cell.
StepOutcome step(const House& house, int cell, Action action, const DetectorModel& detector,
                 int concept_count, Rng& rng);

/// True iff the last `dwell` trajectory cells all lie in rooms of `target`.
bool success_check(const House& house, std::span<const int> trajectory, ConceptId target,
                   int dwell = 3);

/// Grid-step BFS distance from every cell to the nearest cell of a concept
/// (-1 where unreachable or walls).
std::vector<int> distance_field(const House& house, ConceptId concept_id);

/// A house with cached per-concept distance fields. Immutable once built.
class World {
 public:
  static constexpr int kUnreachable = -1;

  World(House house, int concept_count);

  const House& house() const { return house_; }
  int concept_count() const { return concept_count_; }

  /// BFS steps from `cell` to the nearest cell of `concept_id`, or kUnreachable.
  int distance(ConceptId concept_id, int cell) const;
  /// Moves from `cell` that reduce the distance to the concept, as a bit
  /// mask over Action values.
  std::uint8_t descent_moves(ConceptId concept_id, int cell) const;

 private:
  House house_;
  int concept_count_;
  std::vector<std::vector<int>> fields_;
};

/// Optimal episode length for a target: BFS distance to the nearest target
/// cell plus the two dwell steps of the success check. Throws
/// std::runtime_error("disconnected target") if unreachable.
int shortest_path_len(const World& world, int cell, ConceptId target);
int shortest_path_len(const House& house, Cell cell, ConceptId target);

/// Ground-truth "close-by" relations of one house over K+1 nodes.
struct GroundTruthRelations {
  PairTable<std::uint8_t> adjacency;

  bool related(ConceptId i, ConceptId j) const { return adjacency.at(i, j) != 0; }
  int node_count() const { return adjacency.node_count(); }
};

/// Random-exploration reachability samples: for each concept i present in
/// the house, `trials` random walks of `budget` steps start from a uniform
/// cell of a type-i room; each walk yields one sample per other node j
/// (positive iff it entered a type-j room). Both walk directions pool into
/// the unordered pair.
PairTable<BernoulliTally> sample_reachability(const House& house, int concept_count, int budget,
                                              int trials, Rng& rng);

/// z(i, j) = true iff at least one sampled walk connected i and j.
GroundTruthRelations ground_truth_relations(const House& house, int concept_count, int budget = 300,
                                            int trials = 50, std::uint64_t rng_seed = 0);

/// Hop count of the shortest path in the boolean relation graph from any
/// set node of `start` to `target`; 0 if target is already set.
std::optional<int> plan_distance(const GroundTruthRelations& gt, const SemanticVector& start,
                                 ConceptId target);

}  // namespace brm
