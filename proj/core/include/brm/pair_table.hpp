#pragma once

#include <cassert>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace brm {

/// Values attached to unordered node pairs {i, j}, i != j, stored row-major
/// over the strict upper triangle: (0,1), (0,2), ..., (0,n-1), (1,2), ...
template <typename T>
class PairTable {
 public:
  PairTable() = default;
  explicit PairTable(int node_count, T init = T{})
      : node_count_(node_count),
        values_(static_cast<std::size_t>(pair_count(node_count)), init) {}

  static constexpr int pair_count(int node_count) { return node_count * (node_count - 1) / 2; }

  int node_count() const { return node_count_; }
  std::size_t size() const { return values_.size(); }

  std::size_t index(int i, int j) const {
    if (i == j || i < 0 || j < 0 || i >= node_count_ || j >= node_count_) {
      throw std::out_of_range("invalid node pair");
    }
    if (i > j) std::swap(i, j);
    const auto n = static_cast<std::size_t>(node_count_);
    const auto a = static_cast<std::size_t>(i);
    return a * n - a * (a + 1) / 2 + static_cast<std::size_t>(j - i - 1);
  }

  /// Inverse of index().
  std::pair<int, int> pair_at(std::size_t idx) const {
    int i = 0;
    std::size_t row = static_cast<std::size_t>(node_count_ - 1);
    while (idx >= row) {
      idx -= row;
      --row;
      ++i;
    }
    return {i, i + 1 + static_cast<int>(idx)};
  }

  decltype(auto) at(int i, int j) { return values_[index(i, j)]; }
  decltype(auto) at(int i, int j) const { return values_[index(i, j)]; }

  decltype(auto) operator[](std::size_t idx) { return values_[idx]; }
  decltype(auto) operator[](std::size_t idx) const { return values_[idx]; }

  auto begin() { return values_.begin(); }
  auto end() { return values_.end(); }
  auto begin() const { return values_.begin(); }
  auto end() const { return values_.end(); }

  const std::vector<T>& values() const { return values_; }

  friend bool operator==(const PairTable&, const PairTable&) = default;

 private:
  int node_count_ = 0;
  std::vector<T> values_;
};

}  // namespace brm
