#include "brm/agent.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace brm {

namespace {

constexpr int kSelfStopStreak = 3;

}  // namespace

std::string_view to_string(AgentMode mode) {
  switch (mode) {
    case AgentMode::kBrm:
      return "brm";
    case AgentMode::kPure:
      return "pure";
    case AgentMode::kRandom:
      return "random";
    case AgentMode::kBrmUniformPrior:
      return "brm_uniform_prior";
    case AgentMode::kOptimalPlanner:
      return "optimal_planner";
  }
  return "?";
}

AgentMode agent_mode_from_string(std::string_view name) {
  for (auto m : {AgentMode::kBrm, AgentMode::kPure, AgentMode::kRandom, AgentMode::kBrmUniformPrior,
                 AgentMode::kOptimalPlanner}) {
    if (to_string(m) == name) return m;
  }
  throw std::invalid_argument("unknown agent mode: " + std::string(name));
}

std::string_view to_string(Termination termination) {
  return termination == Termination::kEnvironment ? "environment" : "self";
}

Termination termination_from_string(std::string_view name) {
  if (name == "environment") return Termination::kEnvironment;
  if (name == "self") return Termination::kSelf;
  throw std::invalid_argument("unknown termination mode: " + std::string(name));
}

void AgentConfig::validate() const {
  if (replan_period < 1 || replan_period > horizon) {
    throw std::invalid_argument("replan period must satisfy 1 <= N <= H");
  }
}

PairTable<double> truth_edge_probabilities(const GroundTruthRelations& truth, double eps) {
  PairTable<double> out(truth.node_count());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = truth.adjacency[k] ? 1.0 - eps : eps;
  return out;
}

ConceptId select_subgoal(const Plan& plan, ConceptId target, AgentMode mode) {
  if (!plan.reachable()) return target;
  if (mode == AgentMode::kOptimalPlanner && plan.score <= 0.5) return target;
  return next_subgoal(plan);
}

EpisodeResult run_episode(const EpisodeContext& context, const EpisodeConfig& episode,
                          const AgentConfig& agent, const RelationGraph& graph,
                          EpisodeObserver* observer) {
  agent.validate();
  const World& world = context.world;
  const House& house = world.house();
  const int k = world.concept_count();
  if (graph.vocabulary().concept_count() != k) throw std::invalid_argument("graph vocabulary does not match world");
  if (agent.mode == AgentMode::kOptimalPlanner && context.truth == nullptr) {
    throw std::invalid_argument("optimal planner needs ground-truth relations");
  }

  RelationGraph belief = reset_episode(graph);
  if (agent.mode == AgentMode::kBrmUniformPrior) {
    belief.set_priors(PairTable<double>(belief.node_count(), 0.5));
  }
  PairTable<double> truth_probs;
  if (agent.mode == AgentMode::kOptimalPlanner) truth_probs = truth_edge_probabilities(*context.truth);

  const bool uses_graph = agent.mode == AgentMode::kBrm || agent.mode == AgentMode::kBrmUniformPrior;
  const bool plans = uses_graph || agent.mode == AgentMode::kOptimalPlanner;
  const LocomotionSpec locomotion = agent.mode == AgentMode::kRandom ? LocomotionSpec::random() : context.locomotion;

  Rng detector_rng(derive_seed(episode.rng_seed, 1));
  Rng locomotion_rng(derive_seed(episode.rng_seed, 2));
  SmoothingFilter filter(k, context.smoothing_threshold, context.smoothing_persistence);
  std::vector<SemanticVector> buffer;
  buffer.reserve(static_cast<std::size_t>(agent.replan_period));
  std::vector<std::uint32_t> visits(static_cast<std::size_t>(house.cell_count()), 0);

  EpisodeResult result;
  result.shortest_path = shortest_path_len(world, house.index(episode.start), episode.target);
  result.plan_distance_bucket = std::min(episode.plan_distance, 5);

  int cell = house.index(episode.start);
  result.trajectory.push_back(cell);
  ++visits[static_cast<std::size_t>(cell)];
  ConceptId subgoal = episode.target;
  if (agent.mode == AgentMode::kPure) result.subgoal_log.emplace_back(0, subgoal);
  int target_streak = 0;

  for (int t = 0; t < agent.horizon; ++t) {
    const SemanticVector current = filter.push(context.detector.emit(house, cell, k, detector_rng));
    buffer.push_back(current);

    if (agent.termination == Termination::kSelf) {
      target_streak = current.test(episode.target) ? target_streak + 1 : 0;
      if (target_streak >= kSelfStopStreak) {
        result.success = house.concept_at(cell) == episode.target;
        result.steps_taken = t;
        return result;
      }
    }

    if (plans && t % agent.replan_period == 0) {
      ReplanRecord record;
      record.t = t;
      record.current = current;
      record.evidence = bit_or(buffer);
      if (uses_graph) {
        auto obs = extract_observations(record.evidence);
        if (!agent.unknown_evidence) {
          std::erase_if(obs, [k](const RelationObservation& o) { return o.i == k || o.j == k; });
        }
        belief.observe(obs);
        record.posterior = belief.posteriors();
      } else {
        record.posterior = truth_probs;
      }
      buffer.clear();
      record.plan = plan(record.posterior, current, episode.target);
      record.subgoal = select_subgoal(record.plan, episode.target, agent.mode);
      subgoal = record.subgoal;
      result.subgoal_log.emplace_back(t, subgoal);
      if (observer) observer->on_replan(record);
    } else if (!plans) {
      buffer.clear();
    }

    const int here = cell;
    const GoalReached on_goal = subgoal == episode.target ? GoalReached::kHold : GoalReached::kExplore;
    const Action action = act(locomotion, world, cell, subgoal, visits, locomotion_rng, on_goal);
    cell = house.move(cell, action);
    result.trajectory.push_back(cell);
    ++visits[static_cast<std::size_t>(cell)];
    result.steps_taken = t + 1;
    if (observer) observer->on_step({t, here, current, subgoal, action});

    if (agent.termination == Termination::kEnvironment &&
        success_check(house, result.trajectory, episode.target)) {
      result.success = true;
      return result;
    }
  }
  return result;
}

}  // namespace brm
