#pragma once

// Small hand-rolled generators for property tests. Every generator draws from
// a caller-owned engine so each test case is reproducible from its seed.

#include <cstdint>
#include <string>
#include <vector>

#include "brm/concepts.hpp"
#include "brm/pair_table.hpp"
#include "brm/relation_graph.hpp"
#include "brm/rng.hpp"

namespace brm::testing {

inline int gen_int(Rng& rng, int lo, int hi) {
  return lo + static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(hi - lo + 1)));
}

inline double gen_open01(Rng& rng, double lo = 1e-3, double hi = 1.0 - 1e-3) {
  return uniform_real(rng, lo, hi);
}

/// Channel with fp + fn < 1.
inline ObservationNoise gen_noise(Rng& rng) {
  const double fp = gen_open01(rng, 1e-4, 0.6);
  const double fn = uniform_real(rng, 1e-4, 0.999 - fp);
  return {fp, fn};
}

inline EdgeBelief gen_belief(Rng& rng, int max_count = 50) {
  EdgeBelief b;
  b.params.psi_prior = gen_open01(rng, 0.005, 0.995);
  b.params.noise = gen_noise(rng);
  b.pos_count = static_cast<std::uint32_t>(gen_int(rng, 0, max_count));
  b.neg_count = static_cast<std::uint32_t>(gen_int(rng, 0, max_count));
  return b;
}

/// Mask over node_count nodes with at least one bit set.
inline std::uint32_t gen_nonempty_mask(Rng& rng, int node_count) {
  const std::uint32_t all = node_count >= 32 ? 0xffffffffU : ((1U << node_count) - 1U);
  std::uint32_t m = 0;
  while (m == 0) m = static_cast<std::uint32_t>(rng()) & all;
  return m;
}

inline std::uint32_t gen_mask(Rng& rng, int node_count) {
  const std::uint32_t all = (1U << node_count) - 1U;
  return static_cast<std::uint32_t>(rng()) & all;
}

/// Edge probabilities for a complete graph. With `coarse` the values come from
/// a small set so exact ties are common.
inline PairTable<double> gen_edge_probabilities(Rng& rng, int node_count, bool coarse) {
  static constexpr double kCoarse[] = {0.125, 0.25, 0.5, 0.5, 1.0};
  PairTable<double> p(node_count);
  for (auto& v : p) {
    v = coarse ? kCoarse[uniform_index(rng, std::size(kCoarse))] : gen_open01(rng, 0.01, 0.999);
  }
  return p;
}

inline ConfidenceVector gen_confidences(Rng& rng, int concept_count) {
  ConfidenceVector c;
  c.scores.resize(static_cast<std::size_t>(concept_count));
  for (auto& s : c.scores) s = bernoulli(rng, 0.5) ? uniform_real(rng, 0.85, 1.0) : uniform01(rng);
  return c;
}

inline ConceptVocabulary gen_vocabulary(Rng& rng, int k) {
  std::vector<std::string> names;
  for (int i = 0; i < k; ++i) names.push_back("c" + std::to_string(i) + "_" + std::to_string(rng() % 97));
  return ConceptVocabulary(std::move(names));
}

}  // namespace brm::testing
