#pragma once

// Reference implementations used as test oracles. They share no code with
// the library: brute-force enumeration and direct textbook arithmetic.

#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <vector>

#include "brm/house.hpp"
#include "brm/pair_table.hpp"

namespace brm::testing {

/// P(z=1 | Y) by enumerating z in {0, 1} and multiplying one likelihood term
/// per observation.
inline double brute_force_posterior(double prior, double fp, double fn, int pos, int neg) {
  long double like1 = 1.0L;
  long double like0 = 1.0L;
  for (int k = 0; k < pos; ++k) {
    like1 *= 1.0L - fn;  // P(y=1 | z=1)
    like0 *= fp;         // P(y=1 | z=0)
  }
  for (int k = 0; k < neg; ++k) {
    like1 *= fn;         // P(y=0 | z=1)
    like0 *= 1.0L - fp;  // P(y=0 | z=0)
  }
  const long double a = prior * like1;
  const long double b = (1.0L - prior) * like0;
  return static_cast<double>(a / (a + b));
}

struct EnumeratedPlan {
  std::vector<int> path;
  double product = 0.0;
  double neg_log = 0.0;
};

/// Enumerates every simple path from a node in `start_mask` to `target` over
/// the edges with positive probability. Paths are ranked by the -ln weight
/// accumulated from the start node, then hop count, then node sequence.
/// Also reports the largest product over all paths.
inline std::optional<EnumeratedPlan> enumerate_best_path(const PairTable<double>& p, std::uint32_t start_mask,
                                                         int target, double* max_product = nullptr) {
  const int n = p.node_count();
  std::optional<EnumeratedPlan> best;
  double best_product = 0.0;
  std::vector<int> path;
  std::vector<bool> on_path(static_cast<std::size_t>(n), false);

  auto consider = [&](double cost, double product) {
    best_product = std::max(best_product, product);
    const bool wins = !best || cost < best->neg_log ||
                      (cost == best->neg_log &&
                       (path.size() < best->path.size() ||
                        (path.size() == best->path.size() && path < best->path)));
    if (wins) best = EnumeratedPlan{path, product, cost};
  };

  std::function<void(int, double, double)> extend = [&](int node, double cost, double product) {
    if (node == target) {
      consider(cost, product);
      return;
    }
    for (int next = 0; next < n; ++next) {
      if (on_path[static_cast<std::size_t>(next)]) continue;
      const double w = p.at(node, next);
      if (!(w > 0.0)) continue;
      on_path[static_cast<std::size_t>(next)] = true;
      path.push_back(next);
      extend(next, cost - std::log(w), product * w);
      path.pop_back();
      on_path[static_cast<std::size_t>(next)] = false;
    }
  };

  for (int s = 0; s < n; ++s) {
    if (!((start_mask >> s) & 1U)) continue;
    path.assign(1, s);
    on_path.assign(static_cast<std::size_t>(n), false);
    on_path[static_cast<std::size_t>(s)] = true;
    extend(s, 0.0, 1.0);
  }
  if (max_product) *max_product = best_product;
  return best;
}

/// Plain BFS over the walkable grid using House::move, independent of the
/// cached distance fields in World.
inline std::optional<int> bfs_grid_distance(const House& house, int from, const std::function<bool(int)>& goal) {
  std::vector<int> dist(static_cast<std::size_t>(house.cell_count()), -1);
  std::deque<int> queue{from};
  dist[static_cast<std::size_t>(from)] = 0;
  while (!queue.empty()) {
    const int c = queue.front();
    queue.pop_front();
    if (goal(c)) return dist[static_cast<std::size_t>(c)];
    for (int a = 0; a < 4; ++a) {
      const int nxt = house.move(c, static_cast<Action>(a));
      if (dist[static_cast<std::size_t>(nxt)] < 0) {
        dist[static_cast<std::size_t>(nxt)] = dist[static_cast<std::size_t>(c)] + 1;
        queue.push_back(nxt);
      }
    }
  }
  return std::nullopt;
}

/// Hop distances between rooms over doors (room ids index the result).
inline std::vector<std::vector<int>> room_hops(const House& house) {
  const auto n = house.rooms().size();
  std::vector<std::vector<int>> adj(n);
  for (const auto& d : house.doors()) {
    const int a = house.room_at(d.a);
    const int b = house.room_at(d.b);
    adj[static_cast<std::size_t>(a)].push_back(b);
    adj[static_cast<std::size_t>(b)].push_back(a);
  }
  std::vector<std::vector<int>> hops(n, std::vector<int>(n, -1));
  for (std::size_t s = 0; s < n; ++s) {
    std::deque<int> q{static_cast<int>(s)};
    hops[s][s] = 0;
    while (!q.empty()) {
      const int r = q.front();
      q.pop_front();
      for (int nb : adj[static_cast<std::size_t>(r)]) {
        if (hops[s][static_cast<std::size_t>(nb)] < 0) {
          hops[s][static_cast<std::size_t>(nb)] = hops[s][static_cast<std::size_t>(r)] + 1;
          q.push_back(nb);
        }
      }
    }
  }
  return hops;
}

}  // namespace brm::testing
