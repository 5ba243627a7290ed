#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>

#include "brm/concepts.hpp"
#include "brm/house.hpp"
#include "brm/rng.hpp"
#include "brm/world.hpp"

namespace brm {

enum class LocomotionKind { kRandom, kScripted, kOracle };

std::string_view to_string(LocomotionKind kind);
LocomotionKind locomotion_kind_from_string(std::string_view name);

/// Goal-conditioned low-level controller.
///
/// scripted: walks the BFS shortest path to the sub-goal region once it is
/// within `sight_radius` steps, otherwise explores. A step toward a sub-goal
/// in sight is replaced by a uniformly random action with probability `slip`.
/// Exploration moves to
/// the least-visited neighbouring cell with probability `explore_greed` and
/// picks a random action otherwise.
///
/// oracle: scripted with slip 0 and unlimited sight.
/// random: uniform over the five actions.
struct LocomotionSpec {
  static constexpr int kUnlimitedSight = std::numeric_limits<int>::max();

  LocomotionKind kind = LocomotionKind::kScripted;
  int sight_radius = 12;
  double slip = 0.2;
  double explore_greed = 0.1;

  static LocomotionSpec oracle();
  static LocomotionSpec random();

  void validate() const;
};

Action random_action(Rng& rng);

enum class GoalReached { kHold, kExplore };

/// One control decision. `visits` holds per-cell visit counts for the current
/// episode (indexed by cell). `on_goal` says what to do once the agent stands
/// in a subgoal room: hold still (final targets) or keep exploring.
Action act(const LocomotionSpec& spec, const World& world, int cell, ConceptId subgoal,
           std::span<const std::uint32_t> visits, Rng& rng, GoalReached on_goal = GoalReached::kHold);

}  // namespace brm
