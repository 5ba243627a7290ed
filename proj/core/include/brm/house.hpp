#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "brm/concepts.hpp"

namespace brm {

struct Cell {
  int x = 0;
  int y = 0;

  friend auto operator<=>(const Cell&, const Cell&) = default;
};

struct Room {
  int id = 0;
  ConceptId concept_id = 0;
  std::vector<Cell> cells;

  friend bool operator==(const Room&, const Room&) = default;
};

/// A passage between two 4-adjacent cells of different rooms.
struct Door {
  Cell a;
  Cell b;

  friend bool operator==(const Door&, const Door&) = default;
};

enum class Action : std::uint8_t { kUp, kDown, kLeft, kRight, kStay };
inline constexpr int kActionCount = 5;

/// Grid-embedded floor plan. Cells outside every room are walls; movement
/// between two rooms is only possible through a door.
class House {
 public:
  static constexpr int kWall = -1;

  House() = default;
  /// Validates that rooms are disjoint, doors join adjacent cells of
  /// different rooms, and the door graph over rooms is connected.
  House(int width, int height, std::vector<Room> rooms, std::vector<Door> doors);

  int width() const { return width_; }
  int height() const { return height_; }
  int cell_count() const { return width_ * height_; }
  const std::vector<Room>& rooms() const { return rooms_; }
  const std::vector<Door>& doors() const { return doors_; }

  bool in_bounds(Cell c) const { return c.x >= 0 && c.y >= 0 && c.x < width_ && c.y < height_; }
  int index(Cell c) const { return c.y * width_ + c.x; }
  Cell cell(int index) const { return {index % width_, index / width_}; }

  /// Room id at an in-bounds cell index, or kWall.
  int room_at(int index) const { return room_of_[static_cast<std::size_t>(index)]; }
  int room_at(Cell c) const { return in_bounds(c) ? room_at(index(c)) : kWall; }
  /// Concept of the room covering the cell, or -1 for walls.
  ConceptId concept_at(int index) const;
  ConceptId concept_at(Cell c) const { return in_bounds(c) ? concept_at(index(c)) : -1; }

  bool has_concept(ConceptId id) const;
  bool is_walkable(int index) const { return room_at(index) != kWall; }

  /// Destination cell index of taking `action` from `index`; blocked moves
  /// leave the agent in place.
  int move(int index, Action action) const;
  Cell move(Cell c, Action action) const { return cell(move(index(c), action)); }
  /// Bit a is set when Action(a) leaves the cell.
  std::uint8_t open_moves(int index) const { return moves_[static_cast<std::size_t>(index)]; }

  /// Room ids joined by at least one door (sorted, unique per room).
  const std::vector<std::vector<int>>& room_neighbors() const { return room_neighbors_; }

  std::string to_json() const;
  static House from_json(std::string_view text);

  friend bool operator==(const House& a, const House& b) {
    return a.width_ == b.width_ && a.height_ == b.height_ && a.rooms_ == b.rooms_ && a.doors_ == b.doors_;
  }

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<Room> rooms_;
  std::vector<Door> doors_;
  std::vector<int> room_of_;
  std::vector<std::uint8_t> moves_;
  std::vector<std::vector<int>> room_neighbors_;
};

struct HouseParams {
  int width = 40;
  int height = 40;
  int min_room = 8;
  /// Probability of a door between adjacent rooms beyond the spanning tree.
  double extra_door_probability = 0.15;
  ConceptVocabulary vocabulary;
};

/// Binary-space-partition floor plan with concepts assigned by a room-type
/// affinity sampler. Pure function of (seed, params).
House generate_house(std::uint64_t seed, const HouseParams& params);

/// Relative propensity of two room types to share a door. Symmetric, keyed
/// by the default vocabulary names; unlisted pairs get 1.
double room_affinity(std::string_view a, std::string_view b);

}  // namespace brm
