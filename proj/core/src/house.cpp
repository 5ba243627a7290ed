#include "brm/house.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <numeric>
#include <queue>
#include <stdexcept>
#include <utility>

#include "brm/errors.hpp"
#include "brm/rng.hpp"
#include "json_util.hpp"

namespace brm {

namespace {

constexpr std::array<std::pair<int, int>, 4> kOffsets{{{0, -1}, {0, 1}, {-1, 0}, {1, 0}}};

}  // namespace

House::House(int width, int height, std::vector<Room> rooms, std::vector<Door> doors)
    : width_(width), height_(height), rooms_(std::move(rooms)), doors_(std::move(doors)) {
  if (width_ <= 0 || height_ <= 0) throw std::invalid_argument("house dimensions must be positive");
  if (rooms_.empty()) throw std::invalid_argument("house has no rooms");
  room_of_.assign(static_cast<std::size_t>(cell_count()), kWall);

  for (std::size_t r = 0; r < rooms_.size(); ++r) {
    if (rooms_[r].id != static_cast<int>(r)) throw std::invalid_argument("room ids must be dense and ordered");
    if (rooms_[r].cells.empty()) throw std::invalid_argument("room has no cells");
    if (rooms_[r].concept_id < 0 || rooms_[r].concept_id >= ConceptVocabulary::kMaxConcepts) {
      throw std::invalid_argument("room concept out of range");
    }
    for (const Cell& c : rooms_[r].cells) {
      if (!in_bounds(c)) throw std::invalid_argument("room cell out of bounds");
      auto& slot = room_of_[static_cast<std::size_t>(index(c))];
      if (slot != kWall) throw std::invalid_argument("cell belongs to more than one room");
      slot = static_cast<int>(r);
    }
  }

  std::vector<std::vector<int>> door_at(static_cast<std::size_t>(cell_count()));
  room_neighbors_.assign(rooms_.size(), {});
  for (const Door& d : doors_) {
    if (!in_bounds(d.a) || !in_bounds(d.b)) throw std::invalid_argument("door cell out of bounds");
    if (std::abs(d.a.x - d.b.x) + std::abs(d.a.y - d.b.y) != 1) {
      throw std::invalid_argument("door cells must be 4-adjacent");
    }
    const int ra = room_at(d.a);
    const int rb = room_at(d.b);
    if (ra == kWall || rb == kWall || ra == rb) throw std::invalid_argument("door must join two different rooms");
    door_at[static_cast<std::size_t>(index(d.a))].push_back(index(d.b));
    door_at[static_cast<std::size_t>(index(d.b))].push_back(index(d.a));
    room_neighbors_[static_cast<std::size_t>(ra)].push_back(rb);
    room_neighbors_[static_cast<std::size_t>(rb)].push_back(ra);
  }
  for (auto& n : room_neighbors_) {
    std::sort(n.begin(), n.end());
    n.erase(std::unique(n.begin(), n.end()), n.end());
  }

  moves_.assign(static_cast<std::size_t>(cell_count()), 0);
  for (int i = 0; i < cell_count(); ++i) {
    const int r = room_at(i);
    if (r == kWall) continue;
    const Cell c = cell(i);
    for (int a = 0; a < 4; ++a) {
      const Cell n{c.x + kOffsets[static_cast<std::size_t>(a)].first, c.y + kOffsets[static_cast<std::size_t>(a)].second};
      if (!in_bounds(n)) continue;
      const int rn = room_at(index(n));
      if (rn == kWall) continue;
      const auto& doors_here = door_at[static_cast<std::size_t>(i)];
      if (rn == r || std::find(doors_here.begin(), doors_here.end(), index(n)) != doors_here.end()) {
        moves_[static_cast<std::size_t>(i)] |= static_cast<std::uint8_t>(1U << a);
      }
    }
  }

  // Connectivity of the room graph.
  std::vector<bool> seen(rooms_.size(), false);
  std::vector<int> stack{0};
  seen[0] = true;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const int r = stack.back();
    stack.pop_back();
    for (int n : room_neighbors_[static_cast<std::size_t>(r)]) {
      if (!seen[static_cast<std::size_t>(n)]) {
        seen[static_cast<std::size_t>(n)] = true;
        ++reached;
        stack.push_back(n);
      }
    }
  }
  if (reached != rooms_.size()) throw std::invalid_argument("room graph is not connected");
}

ConceptId House::concept_at(int index) const {
  const int r = room_at(index);
  return r == kWall ? -1 : rooms_[static_cast<std::size_t>(r)].concept_id;
}

bool House::has_concept(ConceptId id) const {
  return std::any_of(rooms_.begin(), rooms_.end(), [id](const Room& r) { return r.concept_id == id; });
}

int House::move(int index, Action action) const {
  if (action == Action::kStay) return index;
  const auto a = static_cast<std::size_t>(action);
  if (!((moves_[static_cast<std::size_t>(index)] >> a) & 1U)) return index;
  return index + kOffsets[a].first + kOffsets[a].second * width_;
}

std::string House::to_json() const {
  nlohmann::ordered_json doc;
  doc["width"] = width_;
  doc["height"] = height_;
  auto rooms = nlohmann::ordered_json::array();
  for (const Room& r : rooms_) {
    nlohmann::ordered_json room;
    room["id"] = r.id;
    room["concept"] = r.concept_id;
    auto cells = nlohmann::ordered_json::array();
    for (const Cell& c : r.cells) cells.push_back({c.x, c.y});
    room["cells"] = std::move(cells);
    rooms.push_back(std::move(room));
  }
  doc["rooms"] = std::move(rooms);
  auto doors = nlohmann::ordered_json::array();
  for (const Door& d : doors_) doors.push_back({{d.a.x, d.a.y}, {d.b.x, d.b.y}});
  doc["doors"] = std::move(doors);
  return doc.dump() + "\n";
}

House House::from_json(std::string_view text) {
  const auto doc = detail::parse_json(text);
  const auto fail = [&](const std::string& msg, std::string_view key) -> ParseError {
    return ParseError("house: " + msg, detail::key_offset(text, key));
  };
  const auto read_cell = [&](const nlohmann::json& v, std::string_view key) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() || !v[1].is_number_integer()) {
      throw fail("cells must be [x, y] integer pairs", key);
    }
    return Cell{v[0].get<int>(), v[1].get<int>()};
  };

  if (!doc.is_object()) throw ParseError("house: expected a JSON object", 0);
  for (const char* key : {"width", "height", "rooms", "doors"}) {
    if (!doc.contains(key)) throw ParseError(std::string("house: missing field '") + key + "'", text.size());
  }
  if (!doc["width"].is_number_integer() || !doc["height"].is_number_integer()) {
    throw fail("width and height must be integers", "width");
  }
  std::vector<Room> rooms;
  if (!doc["rooms"].is_array()) throw fail("rooms must be an array", "rooms");
  for (const auto& r : doc["rooms"]) {
    if (!r.is_object() || !r.contains("id") || !r.contains("concept") || !r.contains("cells") ||
        !r["id"].is_number_integer() || !r["concept"].is_number_integer() || !r["cells"].is_array()) {
      throw fail("room entries need integer id, integer concept and a cells array", "rooms");
    }
    Room room{r["id"].get<int>(), r["concept"].get<int>(), {}};
    for (const auto& c : r["cells"]) room.cells.push_back(read_cell(c, "cells"));
    rooms.push_back(std::move(room));
  }
  std::vector<Door> doors;
  if (!doc["doors"].is_array()) throw fail("doors must be an array", "doors");
  for (const auto& d : doc["doors"]) {
    if (!d.is_array() || d.size() != 2) throw fail("doors must be pairs of cells", "doors");
    doors.push_back({read_cell(d[0], "doors"), read_cell(d[1], "doors")});
  }
  try {
    return House(doc["width"].get<int>(), doc["height"].get<int>(), std::move(rooms), std::move(doors));
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("house: ") + e.what(), 0);
  }
}

double room_affinity(std::string_view a, std::string_view b) {
  struct Entry {
    std::string_view a, b;
    double weight;
  };
  // Pairs that tend to share a door get weights above 1; pairs rarely found
  // together get weights below 1.
  static constexpr std::array<Entry, 20> kTable{{
      {"kitchen", "dining room", 8.0},
      {"kitchen", "living room", 3.0},
      {"dining room", "living room", 4.0},
      {"bedroom", "bathroom", 8.0},
      {"bedroom", "office", 2.5},
      {"living room", "office", 2.0},
      {"garage", "outdoor", 8.0},
      {"living room", "outdoor", 3.0},
      {"garage", "kitchen", 2.0},
      {"bathroom", "garage", 0.15},
      {"bathroom", "outdoor", 0.15},
      {"bathroom", "kitchen", 0.3},
      {"bathroom", "dining room", 0.3},
      {"bedroom", "garage", 0.15},
      {"bedroom", "outdoor", 0.3},
      {"bedroom", "kitchen", 0.4},
      {"dining room", "garage", 0.3},
      {"office", "garage", 0.3},
      {"office", "outdoor", 0.5},
      {"dining room", "outdoor", 0.5},
  }};
  if (a == b) return 0.3;
  for (const auto& e : kTable) {
    if ((e.a == a && e.b == b) || (e.a == b && e.b == a)) return e.weight;
  }
  return 1.0;
}

namespace {

struct Rect {
  int x, y, w, h;
};

void split_rect(const Rect& r, int min_room, Rng& rng, std::vector<Rect>& out) {
  const bool can_v = r.w >= 2 * min_room;
  const bool can_h = r.h >= 2 * min_room;
  if (!can_v && !can_h) {
    out.push_back(r);
    return;
  }
  bool vertical;
  if (can_v && can_h) {
    vertical = r.w != r.h ? r.w > r.h : bernoulli(rng, 0.5);
  } else {
    vertical = can_v;
  }
  const int span = vertical ? r.w : r.h;
  const int cut = min_room + static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(span - 2 * min_room + 1)));
  if (vertical) {
    split_rect({r.x, r.y, cut, r.h}, min_room, rng, out);
    split_rect({r.x + cut, r.y, r.w - cut, r.h}, min_room, rng, out);
  } else {
    split_rect({r.x, r.y, r.w, cut}, min_room, rng, out);
    split_rect({r.x, r.y + cut, r.w, r.h - cut}, min_room, rng, out);
  }
}

int find_root(std::vector<int>& parent, int v) {
  while (parent[static_cast<std::size_t>(v)] != v) {
    parent[static_cast<std::size_t>(v)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(v)])];
    v = parent[static_cast<std::size_t>(v)];
  }
  return v;
}

std::vector<ConceptId> assign_concepts(const std::vector<std::vector<int>>& neighbors,
                                       const ConceptVocabulary& vocab, Rng& rng) {
  const std::size_t rooms = neighbors.size();
  const int k = vocab.concept_count();
  std::vector<ConceptId> assigned(rooms, -1);
  std::vector<int> uses(static_cast<std::size_t>(k), 0);

  // Breadth-first from a random room so each room sees assigned neighbours.
  std::vector<int> order;
  std::vector<bool> queued(rooms, false);
  const int first = static_cast<int>(uniform_index(rng, rooms));
  std::queue<int> q;
  q.push(first);
  queued[static_cast<std::size_t>(first)] = true;
  while (!q.empty()) {
    const int r = q.front();
    q.pop();
    order.push_back(r);
    for (int n : neighbors[static_cast<std::size_t>(r)]) {
      if (!queued[static_cast<std::size_t>(n)]) {
        queued[static_cast<std::size_t>(n)] = true;
        q.push(n);
      }
    }
  }

  std::vector<double> weight(static_cast<std::size_t>(k));
  for (int r : order) {
    double total = 0.0;
    for (ConceptId c = 0; c < k; ++c) {
      double w = 1.0;
      for (int n : neighbors[static_cast<std::size_t>(r)]) {
        const ConceptId nc = assigned[static_cast<std::size_t>(n)];
        if (nc >= 0) w *= room_affinity(vocab.name(c), vocab.name(nc));
      }
      // Favour unused room types so most houses contain every concept.
      for (int u = 0; u < uses[static_cast<std::size_t>(c)]; ++u) w *= 0.2;
      weight[static_cast<std::size_t>(c)] = w;
      total += w;
    }
    double pick = uniform01(rng) * total;
    ConceptId chosen = k - 1;
    for (ConceptId c = 0; c < k; ++c) {
      pick -= weight[static_cast<std::size_t>(c)];
      if (pick < 0.0) {
        chosen = c;
        break;
      }
    }
    assigned[static_cast<std::size_t>(r)] = chosen;
    ++uses[static_cast<std::size_t>(chosen)];
  }
  return assigned;
}

}  // namespace

House generate_house(std::uint64_t seed, const HouseParams& params) {
  const int m = params.min_room;
  if (m < 1 || params.width < 3 * m || params.height < 3 * m) throw std::invalid_argument("degenerate layout");
  const int k = params.vocabulary.concept_count();
  Rng rng(derive_seed(seed, 0x686f757365ULL));

  for (int attempt = 0; attempt < 64; ++attempt) {
    std::vector<Rect> rects;
    split_rect({0, 0, params.width, params.height}, m, rng, rects);
    if (static_cast<int>(rects.size()) < k) continue;

    const int n_rooms = static_cast<int>(rects.size());
    std::vector<int> room_of(static_cast<std::size_t>(params.width * params.height));
    std::vector<Room> rooms(static_cast<std::size_t>(n_rooms));
    for (int r = 0; r < n_rooms; ++r) {
      const Rect& rc = rects[static_cast<std::size_t>(r)];
      rooms[static_cast<std::size_t>(r)].id = r;
      for (int y = rc.y; y < rc.y + rc.h; ++y) {
        for (int x = rc.x; x < rc.x + rc.w; ++x) {
          rooms[static_cast<std::size_t>(r)].cells.push_back({x, y});
          room_of[static_cast<std::size_t>(y * params.width + x)] = r;
        }
      }
    }

    // Candidate door positions per adjacent room pair, in scan order.
    std::map<std::pair<int, int>, std::vector<Door>> boundary;
    for (int y = 0; y < params.height; ++y) {
      for (int x = 0; x < params.width; ++x) {
        const int r = room_of[static_cast<std::size_t>(y * params.width + x)];
        if (x + 1 < params.width) {
          const int s = room_of[static_cast<std::size_t>(y * params.width + x + 1)];
          if (s != r) boundary[{std::min(r, s), std::max(r, s)}].push_back({{x, y}, {x + 1, y}});
        }
        if (y + 1 < params.height) {
          const int s = room_of[static_cast<std::size_t>((y + 1) * params.width + x)];
          if (s != r) boundary[{std::min(r, s), std::max(r, s)}].push_back({{x, y}, {x, y + 1}});
        }
      }
    }

    std::vector<std::pair<int, int>> pairs;
    for (const auto& [key, cells] : boundary) pairs.push_back(key);
    for (std::size_t i = pairs.size(); i > 1; --i) {
      std::swap(pairs[i - 1], pairs[uniform_index(rng, i)]);
    }

    std::vector<int> parent(static_cast<std::size_t>(n_rooms));
    std::iota(parent.begin(), parent.end(), 0);
    std::vector<Door> doors;
    std::vector<std::vector<int>> neighbors(static_cast<std::size_t>(n_rooms));
    for (const auto& key : pairs) {
      const int ra = find_root(parent, key.first);
      const int rb = find_root(parent, key.second);
      const bool tree_edge = ra != rb;
      if (tree_edge) parent[static_cast<std::size_t>(ra)] = rb;
      if (!tree_edge && !bernoulli(rng, params.extra_door_probability)) continue;
      const auto& candidates = boundary[key];
      // Keep doors off the corners of the shared wall when possible.
      const std::size_t inner = candidates.size() > 2 ? candidates.size() - 2 : candidates.size();
      const std::size_t offset = candidates.size() > 2 ? 1 : 0;
      doors.push_back(candidates[offset + uniform_index(rng, inner)]);
      neighbors[static_cast<std::size_t>(key.first)].push_back(key.second);
      neighbors[static_cast<std::size_t>(key.second)].push_back(key.first);
    }
    for (auto& n : neighbors) std::sort(n.begin(), n.end());

    const auto concepts = assign_concepts(neighbors, params.vocabulary, rng);
    for (int r = 0; r < n_rooms; ++r) rooms[static_cast<std::size_t>(r)].concept_id = concepts[static_cast<std::size_t>(r)];
    std::sort(doors.begin(), doors.end(), [](const Door& a, const Door& b) {
      return std::tie(a.a, a.b) < std::tie(b.a, b.b);
    });
    return House(params.width, params.height, std::move(rooms), std::move(doors));
  }
  throw std::invalid_argument("degenerate layout");
}

}  // namespace brm
