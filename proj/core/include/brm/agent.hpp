#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "brm/concepts.hpp"
#include "brm/locomotion.hpp"
#include "brm/relation_graph.hpp"
#include "brm/world.hpp"

namespace brm {

enum class AgentMode { kBrm, kPure, kRandom, kBrmUniformPrior, kOptimalPlanner };
enum class Termination { kEnvironment, kSelf };

std::string_view to_string(AgentMode mode);
AgentMode agent_mode_from_string(std::string_view name);
std::string_view to_string(Termination termination);
Termination termination_from_string(std::string_view name);

struct AgentConfig {
  AgentMode mode = AgentMode::kBrm;
  int replan_period = 10;
  int horizon = 300;
  Termination termination = Termination::kEnvironment;
  // Whether edges touching the unknown node receive evidence. Houses here
  // have no unclassified regions, so unknown frames only come from filter
  // latency at doorways and detector misses; off by default.
  bool unknown_evidence = false;

  void validate() const;
};

/// One fixed evaluation episode. The target is
/// reachable from the start and the start is not inside a target room.
struct EpisodeConfig {
  std::uint64_t house_seed = 0;
  int house_index = 0;  // position in the corpus the suite was built from
  Cell start;
  ConceptId target = 0;
  std::uint64_t rng_seed = 0;
  int plan_distance = 0;
  int shortest_path = 0;  // shortest_path_len at build time

  friend bool operator==(const EpisodeConfig&, const EpisodeConfig&) = default;
};

struct EpisodeResult {
  bool success = false;
  int steps_taken = 0;
  int plan_distance_bucket = 0;
  int shortest_path = 0;
  std::vector<int> trajectory;  // cell indices, start cell first
  std::vector<std::pair<int, ConceptId>> subgoal_log;
};

struct StepRecord {
  int t = 0;
  int cell = 0;
  SemanticVector smoothed;
  ConceptId subgoal = 0;
  Action action = Action::kStay;
};

struct ReplanRecord {
  int t = 0;
  SemanticVector current;
  SemanticVector evidence;      // bit-OR of the buffer consumed by this update
  PairTable<double> posterior;  // edge probabilities the planner used
  Plan plan;
  ConceptId subgoal = 0;
};

/// Optional hooks for tracing an episode.
class EpisodeObserver {
 public:
  virtual ~EpisodeObserver() = default;
  virtual void on_replan(const ReplanRecord&) {}
  virtual void on_step(const StepRecord&) {}
};

/// Everything an episode reads but never mutates.
struct EpisodeContext {
  const World& world;
  const GroundTruthRelations* truth = nullptr;  // required for kOptimalPlanner
  DetectorModel detector;
  LocomotionSpec locomotion;
  double smoothing_threshold = 0.9;
  int smoothing_persistence = 3;
};

/// Edge probabilities for the optimal planner: 1 - eps on true relations,
/// eps elsewhere.
PairTable<double> truth_edge_probabilities(const GroundTruthRelations& truth, double eps = 1e-6);

/// Sub-goal for a fresh plan. Unreachable plans fall back to the target, and
/// the optimal planner also falls back when its best path crosses a
/// non-relation (score <= 0.5).
ConceptId select_subgoal(const Plan& plan, ConceptId target, AgentMode mode);

/// Runs one episode of the hierarchical agent. `graph` carries the learned
/// prior and observation channel; its counts are reset before the episode.
EpisodeResult run_episode(const EpisodeContext& context, const EpisodeConfig& episode,
                          const AgentConfig& agent, const RelationGraph& graph,
                          EpisodeObserver* observer = nullptr);

}  // namespace brm
