#include "brm/locomotion.hpp"

#include <array>
#include <bit>
#include <stdexcept>
#include <string>

namespace brm {

std::string_view to_string(LocomotionKind kind) {
  switch (kind) {
    case LocomotionKind::kRandom:
      return "random";
    case LocomotionKind::kScripted:
      return "scripted";
    case LocomotionKind::kOracle:
      return "oracle";
  }
  return "?";
}

LocomotionKind locomotion_kind_from_string(std::string_view name) {
  if (name == "random") return LocomotionKind::kRandom;
  if (name == "scripted") return LocomotionKind::kScripted;
  if (name == "oracle") return LocomotionKind::kOracle;
  throw std::invalid_argument("unknown locomotion kind: " + std::string(name));
}

LocomotionSpec LocomotionSpec::oracle() {
  LocomotionSpec spec;
  spec.kind = LocomotionKind::kOracle;
  spec.sight_radius = kUnlimitedSight;
  spec.slip = 0.0;
  return spec;
}

LocomotionSpec LocomotionSpec::random() {
  LocomotionSpec spec;
  spec.kind = LocomotionKind::kRandom;
  return spec;
}

void LocomotionSpec::validate() const {
  if (sight_radius < 1) throw std::invalid_argument("sight_radius must be >= 1");
  if (slip < 0.0 || slip >= 1.0) throw std::invalid_argument("slip must be in [0, 1)");
  if (explore_greed < 0.0 || explore_greed > 1.0) throw std::invalid_argument("explore_greed must be in [0, 1]");
}

Action random_action(Rng& rng) { return static_cast<Action>(uniform_index(rng, kActionCount)); }

namespace {

// Uniform pick among the set bits of a non-empty 4-bit move mask.
Action pick_move(std::uint8_t mask, Rng& rng) {
  const int count = std::popcount(static_cast<unsigned>(mask));
  auto k = static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(count)));
  for (int a = 0; a < 4; ++a) {
    if (((mask >> a) & 1U) && k-- == 0) return static_cast<Action>(a);
  }
  return Action::kStay;
}

Action explore(const LocomotionSpec& spec, const House& house, int cell,
               std::span<const std::uint32_t> visits, Rng& rng) {
  const std::uint8_t open = house.open_moves(cell);
  if (open == 0 || !bernoulli(rng, spec.explore_greed)) return random_action(rng);
  std::uint32_t least = UINT32_MAX;
  std::uint8_t best = 0;
  for (int a = 0; a < 4; ++a) {
    if (!((open >> a) & 1U)) continue;
    const std::uint32_t v = visits[static_cast<std::size_t>(house.move(cell, static_cast<Action>(a)))];
    if (v < least) {
      least = v;
      best = 0;
    }
    if (v == least) best |= static_cast<std::uint8_t>(1U << a);
  }
  return pick_move(best, rng);
}

}  // namespace

Action act(const LocomotionSpec& spec, const World& world, int cell, ConceptId subgoal,
           std::span<const std::uint32_t> visits, Rng& rng, GoalReached on_goal) {
  if (spec.kind == LocomotionKind::kRandom) return random_action(rng);

  const bool oracle = spec.kind == LocomotionKind::kOracle;
  const double slip = oracle ? 0.0 : spec.slip;
  const int sight = oracle ? LocomotionSpec::kUnlimitedSight : spec.sight_radius;

  const int d = world.distance(subgoal, cell);
  if (d == World::kUnreachable || d > sight || (d == 0 && on_goal == GoalReached::kExplore)) {
    return explore(spec, world.house(), cell, visits, rng);
  }
  if (slip > 0.0 && bernoulli(rng, slip)) return random_action(rng);
  if (d == 0) return Action::kStay;
  return pick_move(world.descent_moves(subgoal, cell), rng);
}

}  // namespace brm
