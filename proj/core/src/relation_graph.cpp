#include "brm/relation_graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "brm/errors.hpp"
#include "json_util.hpp"

namespace brm {

namespace {

bool in_open_unit(double v) { return v > 0.0 && v < 1.0; }

}  // namespace

void EdgeParams::validate() const {
  if (!in_open_unit(psi_prior)) throw std::invalid_argument("psi_prior must be in (0, 1)");
  if (!in_open_unit(noise.false_positive) || !in_open_unit(noise.false_negative)) {
    throw std::invalid_argument("observation noise must be in (0, 1)");
  }
  if (noise.false_positive + noise.false_negative >= 1.0) {
    throw std::invalid_argument("observation channel must be informative (fp + fn < 1)");
  }
}

double log_odds(const EdgeBelief& belief) {
  const auto& p = belief.params;
  const double fp = p.noise.false_positive;
  const double fn = p.noise.false_negative;
  return std::log(p.psi_prior) - std::log1p(-p.psi_prior) +
         belief.pos_count * (std::log1p(-fn) - std::log(fp)) +
         belief.neg_count * (std::log(fn) - std::log1p(-fp));
}

double posterior(const EdgeBelief& belief) {
  const double lo = log_odds(belief);
  double p;
  if (lo >= 0.0) {
    p = 1.0 / (1.0 + std::exp(-lo));
  } else {
    const double e = std::exp(lo);
    p = e / (1.0 + e);
  }
  // Saturation in double precision would otherwise give exactly 0 or 1.
  constexpr double kHigh = 1.0 - std::numeric_limits<double>::epsilon() / 2;
  return std::clamp(p, std::numeric_limits<double>::denorm_min(), kHigh);
}

RelationGraph::RelationGraph(ConceptVocabulary vocabulary, ObservationNoise noise, double psi_prior)
    : vocabulary_(std::move(vocabulary)), edges_(vocabulary_.node_count()) {
  const EdgeParams params{psi_prior, noise};
  params.validate();
  for (auto& e : edges_) e.params = params;
}

RelationGraph::RelationGraph(ConceptVocabulary vocabulary, const PairTable<double>& priors,
                             ObservationNoise noise)
    : RelationGraph(std::move(vocabulary), noise) {
  set_priors(priors);
}

PairTable<double> RelationGraph::posteriors() const {
  PairTable<double> out(node_count());
  for (std::size_t k = 0; k < edges_.size(); ++k) out[k] = brm::posterior(edges_[k]);
  return out;
}

PairTable<double> RelationGraph::priors() const {
  PairTable<double> out(node_count());
  for (std::size_t k = 0; k < edges_.size(); ++k) out[k] = edges_[k].params.psi_prior;
  return out;
}

void RelationGraph::set_priors(const PairTable<double>& priors) {
  if (priors.node_count() != node_count()) throw std::invalid_argument("prior table size mismatch");
  for (double v : priors) {
    if (!in_open_unit(v)) throw std::invalid_argument("psi_prior must be in (0, 1)");
  }
  for (std::size_t k = 0; k < edges_.size(); ++k) edges_[k].params.psi_prior = priors[k];
}

void RelationGraph::set_observation_noise(ObservationNoise noise) {
  EdgeParams{0.5, noise}.validate();
  for (auto& e : edges_) e.params.noise = noise;
}

void RelationGraph::set_edge_params(ConceptId i, ConceptId j, const EdgeParams& params) {
  params.validate();
  edges_.at(i, j).params = params;
}

ObservationNoise RelationGraph::shared_observation_noise() const {
  const ObservationNoise first = edges_[0].params.noise;
  for (const auto& e : edges_) {
    if (!(e.params.noise == first)) throw std::logic_error("edges use different observation noise");
  }
  return first;
}

void RelationGraph::observe(std::span<const RelationObservation> observations) {
  // Validate everything first so a bad batch leaves the graph untouched.
  for (const auto& o : observations) {
    if (o.i == o.j) throw std::invalid_argument("self-relation");
    if (o.i < 0 || o.j < 0 || o.i >= node_count() || o.j >= node_count()) {
      throw std::out_of_range("observation concept out of range");
    }
  }
  for (const auto& o : observations) {
    auto& e = edges_.at(o.i, o.j);
    if (o.value) {
      ++e.pos_count;
    } else {
      ++e.neg_count;
    }
  }
}

void RelationGraph::reset_counts() {
  for (auto& e : edges_) {
    e.pos_count = 0;
    e.neg_count = 0;
  }
}

void RelationGraph::set_counts(ConceptId i, ConceptId j, std::uint32_t pos_count,
                               std::uint32_t neg_count) {
  auto& e = edges_.at(i, j);
  e.pos_count = pos_count;
  e.neg_count = neg_count;
}

RelationGraph update(RelationGraph graph, std::span<const RelationObservation> observations) {
  graph.observe(observations);
  return graph;
}

RelationGraph reset_episode(RelationGraph graph) {
  graph.reset_counts();
  return graph;
}

namespace {

struct Label {
  double cost = std::numeric_limits<double>::infinity();
  std::vector<ConceptId> path;

  bool valid() const { return !path.empty(); }
};

// Total order used by the planner: lower cost, then fewer hops, then the
// lexicographically smaller node sequence.
bool better(const Label& a, const Label& b) {
  if (!b.valid()) return a.valid();
  if (!a.valid()) return false;
  if (a.cost != b.cost) return a.cost < b.cost;
  if (a.path.size() != b.path.size()) return a.path.size() < b.path.size();
  return a.path < b.path;
}

}  // namespace

Plan plan(const PairTable<double>& edge_probability, const SemanticVector& current,
          ConceptId target) {
  const int n = edge_probability.node_count();
  if (current.node_count() != n) throw std::invalid_argument("semantic vector size mismatch");
  if (target < 0 || target >= n - 1) throw std::invalid_argument("target must be a named concept");
  if (current.none()) throw std::invalid_argument("current semantic vector is empty");

  // Dijkstra under -ln(probability) from a virtual source attached to every
  // currently detected node.
  std::vector<Label> labels(static_cast<std::size_t>(n));
  std::vector<bool> done(static_cast<std::size_t>(n), false);
  for (ConceptId v = 0; v < n; ++v) {
    if (current.test(v)) labels[static_cast<std::size_t>(v)] = Label{0.0, {v}};
  }

  for (;;) {
    int best = -1;
    for (int v = 0; v < n; ++v) {
      if (done[static_cast<std::size_t>(v)] || !labels[static_cast<std::size_t>(v)].valid()) continue;
      if (best < 0 || better(labels[static_cast<std::size_t>(v)], labels[static_cast<std::size_t>(best)])) {
        best = v;
      }
    }
    if (best < 0) return {};
    done[static_cast<std::size_t>(best)] = true;
    const Label& from = labels[static_cast<std::size_t>(best)];
    if (best == target) break;

    for (int u = 0; u < n; ++u) {
      if (u == best || done[static_cast<std::size_t>(u)]) continue;
      const double prob = edge_probability.at(best, u);
      if (!(prob > 0.0)) continue;
      Label candidate{from.cost - std::log(prob), from.path};
      candidate.path.push_back(u);
      if (better(candidate, labels[static_cast<std::size_t>(u)])) {
        labels[static_cast<std::size_t>(u)] = std::move(candidate);
      }
    }
  }

  Plan result;
  result.path = labels[static_cast<std::size_t>(target)].path;
  result.score = 1.0;
  for (std::size_t k = 1; k < result.path.size(); ++k) {
    result.score *= edge_probability.at(result.path[k - 1], result.path[k]);
  }
  return result;
}

Plan plan(const RelationGraph& graph, const SemanticVector& current, ConceptId target) {
  return plan(graph.posteriors(), current, target);
}

ConceptId next_subgoal(const Plan& p) {
  if (p.path.empty()) throw std::invalid_argument("empty plan");
  return p.path.size() >= 2 ? p.path[1] : p.path[0];
}

PairTable<double> learn_prior(const PairTable<BernoulliTally>& samples, double clamp) {
  if (!(clamp > 0.0 && clamp < 0.5)) throw std::invalid_argument("clamp must be in (0, 0.5)");
  PairTable<double> out(samples.node_count());
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const auto& t = samples[k];
    if (t.total == 0) throw std::invalid_argument("no reachability samples");
    const double mle = static_cast<double>(t.positives) / static_cast<double>(t.total);
    out[k] = std::clamp(mle, clamp, 1.0 - clamp);
  }
  return out;
}

std::string serialize(const RelationGraph& graph, bool include_counts) {
  nlohmann::ordered_json doc;
  doc["vocabulary"] = graph.vocabulary().names();

  bool uniform_noise = true;
  const ObservationNoise first = graph.edges()[0].params.noise;
  for (const auto& e : graph.edges()) uniform_noise = uniform_noise && e.params.noise == first;
  doc["psi_obs"] = {first.false_positive, first.false_negative};

  auto prior = nlohmann::ordered_json::array();
  for (const auto& e : graph.edges()) prior.push_back(e.params.psi_prior);
  doc["prior"] = std::move(prior);

  if (!uniform_noise) {
    auto per_edge = nlohmann::ordered_json::array();
    for (const auto& e : graph.edges()) {
      per_edge.push_back({e.params.noise.false_positive, e.params.noise.false_negative});
    }
    doc["psi_obs_edges"] = std::move(per_edge);
  }
  if (include_counts) {
    auto counts = nlohmann::ordered_json::array();
    for (const auto& e : graph.edges()) counts.push_back({e.pos_count, e.neg_count});
    doc["counts"] = std::move(counts);
  }
  return doc.dump(2) + "\n";
}

namespace {

ObservationNoise read_noise(const nlohmann::json& v, std::size_t offset) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    throw ParseError("psi_obs must be a [fp, fn] pair of numbers", offset);
  }
  return {v[0].get<double>(), v[1].get<double>()};
}

}  // namespace

RelationGraph deserialize(std::string_view text) {
  const auto doc = detail::parse_json(text);
  if (!doc.is_object()) throw ParseError("graph file must be a JSON object", 0);
  for (const char* key : {"vocabulary", "psi_obs", "prior"}) {
    if (!doc.contains(key)) throw ParseError(std::string("missing field '") + key + "'", text.size());
  }

  const std::size_t vocab_at = detail::key_offset(text, "vocabulary");
  const auto& vocab_json = doc["vocabulary"];
  if (!vocab_json.is_array()) throw ParseError("vocabulary must be an array", vocab_at);
  std::vector<std::string> names;
  for (const auto& n : vocab_json) {
    if (!n.is_string()) throw ParseError("vocabulary entries must be strings", vocab_at);
    names.push_back(n.get<std::string>());
  }

  try {
    ConceptVocabulary vocabulary(std::move(names));
    const ObservationNoise noise = read_noise(doc["psi_obs"], detail::key_offset(text, "psi_obs"));
    RelationGraph graph(vocabulary, noise);

    const std::size_t prior_at = detail::key_offset(text, "prior");
    const auto& prior = doc["prior"];
    if (!prior.is_array() || prior.size() != graph.edge_count()) {
      throw ParseError("prior must hold " + std::to_string(graph.edge_count()) + " values", prior_at);
    }
    PairTable<double> priors(graph.node_count());
    for (std::size_t k = 0; k < priors.size(); ++k) {
      if (!prior[k].is_number()) throw ParseError("prior values must be numbers", prior_at);
      priors[k] = prior[k].get<double>();
    }
    graph.set_priors(priors);

    if (doc.contains("psi_obs_edges")) {
      const std::size_t at = detail::key_offset(text, "psi_obs_edges");
      const auto& per_edge = doc["psi_obs_edges"];
      if (!per_edge.is_array() || per_edge.size() != graph.edge_count()) {
        throw ParseError("psi_obs_edges must hold one pair per edge", at);
      }
      for (std::size_t k = 0; k < graph.edge_count(); ++k) {
        const auto [i, j] = graph.edges().pair_at(k);
        graph.set_edge_params(i, j, {priors[k], read_noise(per_edge[k], at)});
      }
    }

    if (doc.contains("counts")) {
      const std::size_t at = detail::key_offset(text, "counts");
      const auto& counts = doc["counts"];
      if (!counts.is_array() || counts.size() != graph.edge_count()) {
        throw ParseError("counts must hold one [pos, neg] pair per edge", at);
      }
      for (std::size_t k = 0; k < graph.edge_count(); ++k) {
        const auto& c = counts[k];
        if (!c.is_array() || c.size() != 2 || !c[0].is_number_unsigned() || !c[1].is_number_unsigned()) {
          throw ParseError("counts entries must be [pos, neg] non-negative integers", at);
        }
        const auto [i, j] = graph.edges().pair_at(k);
        graph.set_counts(i, j, c[0].get<std::uint32_t>(), c[1].get<std::uint32_t>());
      }
    }
    return graph;
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what(), 0);
  }
}

}  // namespace brm
