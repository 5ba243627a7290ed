#include <gtest/gtest.h>

#include <cstdlib>
#include <deque>
#include <set>
#include <stdexcept>

#include "brm/errors.hpp"
#include "brm/eval.hpp"
#include "brm/house.hpp"
#include "brm/world.hpp"
#include "oracles.hpp"

namespace brm {
namespace {

constexpr int kK = 8;

// 1 x (n + m) strip: room 0 (concept 0) holds x < n, room 1 (concept 1) the rest.
House strip(int n, int m = 3) {
  Room a{0, 0, {}};
  Room b{1, 1, {}};
  for (int x = 0; x < n; ++x) a.cells.push_back({x, 0});
  for (int x = n; x < n + m; ++x) b.cells.push_back({x, 0});
  return House(n + m, 1, {a, b}, {Door{{n - 1, 0}, {n, 0}}});
}

// Rooms A(0) - B(1) - C(2) in a row of 2x2 blocks joined by doors.
House three_rooms() {
  std::vector<Room> rooms;
  for (int r = 0; r < 3; ++r) {
    Room room{r, r, {}};
    for (int x = 2 * r; x < 2 * r + 2; ++x) {
      for (int y = 0; y < 2; ++y) room.cells.push_back({x, y});
    }
    rooms.push_back(room);
  }
  return House(6, 2, rooms, {Door{{1, 0}, {2, 0}}, Door{{3, 1}, {4, 1}}});
}

bool rooms_connected(const House& h) {
  const auto hops = testing::room_hops(h);
  for (int v : hops[0]) {
    if (v < 0) return false;
  }
  return true;
}

TEST(House, ConstructorValidates) {
  Room a{0, 0, {{0, 0}}};
  Room b{1, 1, {{2, 0}}};
  EXPECT_THROW(House(3, 1, {a, b}, {}), std::invalid_argument);                    // disconnected
  EXPECT_THROW(House(3, 1, {a, b}, {Door{{0, 0}, {2, 0}}}), std::invalid_argument);  // not adjacent
  Room overlap{1, 1, {{0, 0}}};
  EXPECT_THROW(House(3, 1, {a, overlap}, {}), std::invalid_argument);
}

TEST(House, JsonRoundTrip) {
  const House h = generate_house(5, HouseParams{});
  EXPECT_EQ(House::from_json(h.to_json()), h);
  EXPECT_THROW(House::from_json(R"({"width":3})"), ParseError);
  EXPECT_THROW(House::from_json("{"), ParseError);
}

TEST(GenerateHouse, DeterministicInSeed) {
  const HouseParams p;
  EXPECT_EQ(generate_house(42, p), generate_house(42, p));
  EXPECT_EQ(generate_house(42, p).to_json(), generate_house(42, p).to_json());
  EXPECT_NE(generate_house(42, p), generate_house(43, p));
}

TEST(GenerateHouse, RoomGraphConnectedAndCellsPartitioned) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const House h = generate_house(seed, HouseParams{});
    EXPECT_TRUE(rooms_connected(h)) << seed;
    std::set<std::pair<int, int>> seen;
    for (const auto& r : h.rooms()) {
      for (const auto& c : r.cells) {
        EXPECT_TRUE(seen.insert({c.x, c.y}).second);
        EXPECT_EQ(h.room_at(c), r.id);
      }
    }
  }
}

TEST(GenerateHouse, ConceptCoverageOverHundredSeeds) {
  // Frozen from one run of the generator with default parameters.
  const int frozen[kK] = {100, 100, 99, 96, 94, 99, 96, 98};
  int counts[kK] = {};
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const House h = generate_house(seed, HouseParams{});
    EXPECT_GE(static_cast<int>(h.rooms().size()), kK);
    for (int c = 0; c < kK; ++c) counts[c] += h.has_concept(c) ? 1 : 0;
  }
  for (int c = 0; c < kK; ++c) {
    EXPECT_GE(counts[c], 60);
    EXPECT_EQ(counts[c], frozen[c]) << "concept " << c;
  }
}

TEST(GenerateHouse, DegenerateLayoutThrows) {
  HouseParams p;
  p.width = 10;
  p.height = 10;
  p.min_room = 4;
  try {
    generate_house(1, p);
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_STREQ(e.what(), "degenerate layout");
  }
}

TEST(Step, WallBlocksMove) {
  const House h = strip(4);
  Rng rng(1);
  const DetectorModel det;
  const int start = h.index({0, 0});
  EXPECT_EQ(step(h, start, Action::kUp, det, 2, rng).cell, start);
  EXPECT_EQ(step(h, start, Action::kLeft, det, 2, rng).cell, start);
  EXPECT_EQ(step(h, start, Action::kRight, det, 2, rng).cell, h.index({1, 0}));
}

TEST(Step, NoiselessDetectorIdentifiesRoom) {
  const House h = generate_house(3, HouseParams{});
  const DetectorModel det{1.0, 0.0};
  Rng rng(2);
  int cell = h.index(h.rooms()[0].cells[0]);
  for (int t = 0; t < 500; ++t) {
    const auto out = step(h, cell, static_cast<Action>(rng() % kActionCount), det, kK, rng);
    const Cell a = h.cell(cell);
    const Cell b = h.cell(out.cell);
    EXPECT_LE(std::abs(a.x - b.x) + std::abs(a.y - b.y), 1);  // never teleports
    cell = out.cell;
    for (int c = 0; c < kK; ++c) {
      EXPECT_EQ(out.confidences.scores[static_cast<std::size_t>(c)] >= 0.9, c == h.concept_at(cell));
    }
  }
}

TEST(Step, HitRateMonteCarlo) {
  const House h = strip(3);
  const DetectorModel det{0.95, 0.01};
  Rng rng(3);
  int hits = 0;
  int alarms = 0;
  constexpr int kSteps = 10000;
  for (int t = 0; t < kSteps; ++t) {
    const auto c = det.emit(h, 0, 2, rng);
    hits += c.scores[0] >= 0.9 ? 1 : 0;
    alarms += c.scores[1] >= 0.9 ? 1 : 0;
    EXPECT_GE(c.scores[0], 0.0);
    EXPECT_LE(c.scores[0], 1.0);
  }
  EXPECT_NEAR(hits / double(kSteps), 0.95, 0.01);
  EXPECT_NEAR(alarms / double(kSteps), 0.01, 0.005);
}

TEST(Detector, Validate) {
  EXPECT_THROW((DetectorModel{0.1, 0.2}).validate(), std::invalid_argument);
  EXPECT_THROW((DetectorModel{1.1, 0.0}).validate(), std::invalid_argument);
  EXPECT_NO_THROW((DetectorModel{}).validate());
}

TEST(SuccessCheck, Examples) {
  const House h = strip(3, 3);
  const int in1 = h.index({3, 0}), in2 = h.index({4, 0}), in3 = h.index({5, 0}), out = h.index({2, 0});
  const std::vector<int> three{out, in1, in2, in3};
  EXPECT_TRUE(success_check(h, three, 1));
  const std::vector<int> broken{in1, in2, out};
  EXPECT_FALSE(success_check(h, broken, 1));
  EXPECT_FALSE(success_check(h, std::vector<int>{}, 1));
  const std::vector<int> two{in1, in2};
  EXPECT_FALSE(success_check(h, two, 1));
}

TEST(ShortestPath, InsideTargetIsDwellOnly) {
  const House h = strip(3, 3);
  EXPECT_EQ(shortest_path_len(h, Cell{4, 0}, 1), 2);
}

TEST(ShortestPath, StraightCorridor) {
  for (int n = 1; n <= 12; ++n) {
    const House h = strip(n);
    EXPECT_EQ(shortest_path_len(h, Cell{0, 0}, 1), n + 2) << n;
  }
}

TEST(ShortestPath, DisconnectedTargetThrows) {
  const House h = strip(3);
  try {
    shortest_path_len(h, Cell{0, 0}, 5);
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_STREQ(e.what(), "disconnected target");
  }
}

TEST(ShortestPathProperty, MatchesIndependentBfs) {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const House h = generate_house(seed, HouseParams{});
    const World w(h, kK);
    Rng rng(seed);
    for (int trial = 0; trial < 40; ++trial) {
      const auto& room = h.rooms()[rng() % h.rooms().size()];
      const int cell = h.index(room.cells[rng() % room.cells.size()]);
      const ConceptId target = static_cast<ConceptId>(rng() % kK);
      const auto d = testing::bfs_grid_distance(h, cell, [&](int c) { return h.concept_at(c) == target; });
      if (!d) {
        EXPECT_EQ(w.distance(target, cell), World::kUnreachable);
        continue;
      }
      EXPECT_EQ(w.distance(target, cell), *d);
      EXPECT_EQ(shortest_path_len(w, cell, target), *d + 2);
    }
  }
}

TEST(GroundTruth, AbsentConceptHasNoRelations) {
  const House h = strip(3);
  const auto gt = ground_truth_relations(h, kK, 300, 50, 7);
  for (int j = 0; j <= kK; ++j) {
    if (j != 5) {
      EXPECT_FALSE(gt.related(5, j));
    }
  }
  EXPECT_TRUE(gt.related(0, 1));
}

TEST(GroundTruth, SymmetricAndDeterministic) {
  const House h = generate_house(9, HouseParams{});
  const auto a = ground_truth_relations(h, kK, 300, 50, 11);
  const auto b = ground_truth_relations(h, kK, 300, 50, 11);
  EXPECT_EQ(a.adjacency, b.adjacency);
  for (int i = 0; i <= kK; ++i) {
    for (int j = 0; j <= kK; ++j) {
      if (i != j) {
        EXPECT_EQ(a.related(i, j), a.related(j, i));
      }
    }
  }
}

TEST(GroundTruth, DoorNeighboursAreRelated) {
  int pairs = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const House h = generate_house(seed, HouseParams{});
    const auto gt = ground_truth_relations(h, kK, 300, 50, truth_seed(seed));
    for (const auto& d : h.doors()) {
      const ConceptId a = h.concept_at(d.a);
      const ConceptId b = h.concept_at(d.b);
      if (a == b) continue;
      ++pairs;
      EXPECT_TRUE(gt.related(a, b)) << "seed " << seed;
    }
  }
  EXPECT_EQ(pairs, 323);  // frozen
}

TEST(GroundTruth, AgreesWithRoomDistanceTwo) {
  int agree = 0;
  int total = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const House h = generate_house(seed, HouseParams{});
    const auto gt = ground_truth_relations(h, kK, 300, 50, truth_seed(seed));
    const auto hops = testing::room_hops(h);
    for (int i = 0; i < kK; ++i) {
      for (int j = i + 1; j < kK; ++j) {
        int best = -1;
        for (const auto& ra : h.rooms()) {
          for (const auto& rb : h.rooms()) {
            if (ra.concept_id != i || rb.concept_id != j) continue;
            const int d = hops[static_cast<std::size_t>(ra.id)][static_cast<std::size_t>(rb.id)];
            if (best < 0 || d < best) best = d;
          }
        }
        const bool near = best >= 0 && best <= 2;
        agree += near == gt.related(i, j) ? 1 : 0;
        ++total;
      }
    }
  }
  EXPECT_GE(agree, total * 9 / 10);
  EXPECT_EQ(agree, 519);  // frozen, out of 560
  EXPECT_EQ(total, 560);
}

TEST(GroundTruth, RejectsBadBudget) {
  EXPECT_THROW(ground_truth_relations(strip(3), kK, 0, 50, 1), std::invalid_argument);
}

TEST(GroundTruth, DoorSharingRoomsInSmallHouse) {
  const auto gt = ground_truth_relations(three_rooms(), 3, 300, 50, 5);
  EXPECT_TRUE(gt.related(0, 1));
  EXPECT_TRUE(gt.related(1, 2));
}

TEST(PlanDistance, Examples) {
  GroundTruthRelations gt{PairTable<std::uint8_t>(4)};
  gt.adjacency.at(0, 1) = 1;
  gt.adjacency.at(1, 2) = 1;
  EXPECT_EQ(plan_distance(gt, SemanticVector::of(3, 2), 2), 0);
  EXPECT_EQ(plan_distance(gt, SemanticVector::of(3, 0), 2), 2);
  GroundTruthRelations cut{PairTable<std::uint8_t>(4)};
  cut.adjacency.at(0, 1) = 1;
  EXPECT_FALSE(plan_distance(cut, SemanticVector::of(3, 0), 2).has_value());
}

TEST(World, DescentMovesReduceDistance) {
  const House h = generate_house(4, HouseParams{});
  const World w(h, kK);
  for (int cell = 0; cell < h.cell_count(); ++cell) {
    if (!h.is_walkable(cell)) continue;
    const int d = w.distance(2, cell);
    if (d <= 0) continue;
    const std::uint8_t moves = w.descent_moves(2, cell);
    EXPECT_NE(moves, 0);
    for (int a = 0; a < 4; ++a) {
      if ((moves >> a) & 1U) {
        EXPECT_EQ(w.distance(2, h.move(cell, static_cast<Action>(a))), d - 1);
      }
    }
  }
}

}  // namespace
}  // namespace brm
