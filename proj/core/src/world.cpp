#include "brm/world.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>

namespace brm {

void DetectorModel::validate() const {
  if (hit_rate < 0.0 || hit_rate > 1.0 || false_alarm_rate < 0.0 || false_alarm_rate > 1.0) {
    throw std::invalid_argument("detector rates must be in [0, 1]");
  }
  if (!(hit_rate > false_alarm_rate)) throw std::invalid_argument("detector hit_rate must exceed false_alarm_rate");
}

ConfidenceVector DetectorModel::emit(const House& house, int cell, int concept_count, Rng& rng) const {
  const ConceptId here = house.concept_at(cell);
  ConfidenceVector out;
  out.scores.resize(static_cast<std::size_t>(concept_count));
  for (ConceptId c = 0; c < concept_count; ++c) {
    const bool high = bernoulli(rng, c == here ? hit_rate : false_alarm_rate);
    out.scores[static_cast<std::size_t>(c)] = high ? uniform_real(rng, 0.9, 1.0) : uniform_real(rng, 0.0, 0.9);
  }
  return out;
}

StepOutcome step(const House& house, int cell, Action action, const DetectorModel& detector,
                 int concept_count, Rng& rng) {
  const int next = house.move(cell, action);
  return {next, detector.emit(house, next, concept_count, rng)};
}

bool success_check(const House& house, std::span<const int> trajectory, ConceptId target, int dwell) {
  if (dwell < 1 || trajectory.size() < static_cast<std::size_t>(dwell)) return false;
  return std::all_of(trajectory.end() - dwell, trajectory.end(),
                     [&](int cell) { return house.concept_at(cell) == target; });
}

std::vector<int> distance_field(const House& house, ConceptId concept_id) {
  std::vector<int> dist(static_cast<std::size_t>(house.cell_count()), World::kUnreachable);
  std::deque<int> frontier;
  for (const Room& r : house.rooms()) {
    if (r.concept_id != concept_id) continue;
    for (const Cell& c : r.cells) {
      dist[static_cast<std::size_t>(house.index(c))] = 0;
      frontier.push_back(house.index(c));
    }
  }
  // Movement is symmetric, so distances from the target region equal
  // distances to it.
  while (!frontier.empty()) {
    const int v = frontier.front();
    frontier.pop_front();
    for (int a = 0; a < 4; ++a) {
      const int u = house.move(v, static_cast<Action>(a));
      if (u != v && dist[static_cast<std::size_t>(u)] == World::kUnreachable) {
        dist[static_cast<std::size_t>(u)] = dist[static_cast<std::size_t>(v)] + 1;
        frontier.push_back(u);
      }
    }
  }
  return dist;
}

World::World(House house, int concept_count) : house_(std::move(house)), concept_count_(concept_count) {
  fields_.reserve(static_cast<std::size_t>(concept_count));
  for (ConceptId c = 0; c < concept_count; ++c) fields_.push_back(distance_field(house_, c));
}

int World::distance(ConceptId concept_id, int cell) const {
  if (concept_id < 0 || concept_id >= concept_count_) return kUnreachable;
  return fields_[static_cast<std::size_t>(concept_id)][static_cast<std::size_t>(cell)];
}

std::uint8_t World::descent_moves(ConceptId concept_id, int cell) const {
  const int here = distance(concept_id, cell);
  if (here <= 0) return 0;
  std::uint8_t mask = 0;
  for (int a = 0; a < 4; ++a) {
    const int n = house_.move(cell, static_cast<Action>(a));
    if (n != cell && distance(concept_id, n) == here - 1) mask |= static_cast<std::uint8_t>(1U << a);
  }
  return mask;
}

int shortest_path_len(const World& world, int cell, ConceptId target) {
  const int d = world.distance(target, cell);
  if (d == World::kUnreachable) throw std::runtime_error("disconnected target");
  return d + 2;
}

int shortest_path_len(const House& house, Cell cell, ConceptId target) {
  const auto field = distance_field(house, target);
  const int d = field[static_cast<std::size_t>(house.index(cell))];
  if (d == World::kUnreachable) throw std::runtime_error("disconnected target");
  return d + 2;
}

PairTable<BernoulliTally> sample_reachability(const House& house, int concept_count, int budget,
                                              int trials, Rng& rng) {
  if (budget < 1 || trials < 1) throw std::invalid_argument("budget and trials must be >= 1");
  const int nodes = concept_count + 1;
  PairTable<BernoulliTally> tallies(nodes);

  for (ConceptId i = 0; i < concept_count; ++i) {
    std::vector<int> starts;
    for (const Room& r : house.rooms()) {
      if (r.concept_id != i) continue;
      for (const Cell& c : r.cells) starts.push_back(house.index(c));
    }
    if (starts.empty()) continue;

    for (int t = 0; t < trials; ++t) {
      int cell = starts[uniform_index(rng, starts.size())];
      std::uint32_t visited = 1U << i;
      for (int s = 0; s < budget; ++s) {
        cell = house.move(cell, static_cast<Action>(uniform_index(rng, kActionCount)));
        visited |= 1U << house.concept_at(cell);
      }
      for (ConceptId j = 0; j < nodes; ++j) {
        if (j != i) tallies.at(i, j).add((visited >> j) & 1U);
      }
    }
  }
  return tallies;
}

GroundTruthRelations ground_truth_relations(const House& house, int concept_count, int budget,
                                            int trials, std::uint64_t rng_seed) {
  Rng rng(rng_seed);
  const auto tallies = sample_reachability(house, concept_count, budget, trials, rng);
  GroundTruthRelations gt{PairTable<std::uint8_t>(concept_count + 1, 0)};
  for (std::size_t k = 0; k < tallies.size(); ++k) gt.adjacency[k] = tallies[k].positives > 0 ? 1 : 0;
  return gt;
}

std::optional<int> plan_distance(const GroundTruthRelations& gt, const SemanticVector& start,
                                 ConceptId target) {
  const int n = gt.node_count();
  std::vector<int> dist(static_cast<std::size_t>(n), -1);
  std::deque<int> frontier;
  for (ConceptId v = 0; v < n; ++v) {
    if (start.test(v)) {
      dist[static_cast<std::size_t>(v)] = 0;
      frontier.push_back(v);
    }
  }
  while (!frontier.empty()) {
    const int v = frontier.front();
    frontier.pop_front();
    if (v == target) return dist[static_cast<std::size_t>(v)];
    for (int u = 0; u < n; ++u) {
      if (u != v && dist[static_cast<std::size_t>(u)] < 0 && gt.related(v, u)) {
        dist[static_cast<std::size_t>(u)] = dist[static_cast<std::size_t>(v)] + 1;
        frontier.push_back(u);
      }
    }
  }
  return std::nullopt;
}

}  // namespace brm
