#include "brm/concepts.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

#include "brm/errors.hpp"
#include "json_util.hpp"

namespace brm {

namespace {

const std::string kUnknownName = "unknown";

}  // namespace

ConceptVocabulary::ConceptVocabulary()
    : names_{"kitchen", "living room", "dining room", "bedroom",
             "bathroom", "office", "garage", "outdoor"} {}

ConceptVocabulary::ConceptVocabulary(std::vector<std::string> names) : names_(std::move(names)) {
  if (names_.empty()) throw std::invalid_argument("vocabulary must not be empty");
  if (names_.size() > static_cast<std::size_t>(kMaxConcepts)) {
    throw std::invalid_argument("vocabulary holds at most " + std::to_string(kMaxConcepts) +
                                " concepts");
  }
  std::unordered_set<std::string> seen;
  for (const auto& n : names_) {
    if (n.empty()) throw std::invalid_argument("concept names must be non-empty");
    if (!seen.insert(n).second) throw std::invalid_argument("duplicate concept name: " + n);
  }
}

const std::string& ConceptVocabulary::name(ConceptId id) const {
  if (id == unknown()) return kUnknownName;
  if (id < 0 || id > unknown()) throw std::out_of_range("concept id out of range");
  return names_[static_cast<std::size_t>(id)];
}

std::optional<ConceptId> ConceptVocabulary::find(std::string_view name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) return std::nullopt;
  return static_cast<ConceptId>(it - names_.begin());
}

std::string ConceptVocabulary::to_json() const { return nlohmann::json(names_).dump(); }

ConceptVocabulary ConceptVocabulary::from_json(std::string_view text) {
  const auto doc = detail::parse_json(text);
  if (!doc.is_array()) throw ParseError("vocabulary must be a JSON array of strings", 0);
  std::vector<std::string> names;
  for (const auto& item : doc) {
    if (!item.is_string()) throw ParseError("vocabulary entries must be strings", 0);
    names.push_back(item.get<std::string>());
  }
  try {
    return ConceptVocabulary(std::move(names));
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what(), 0);
  }
}

SemanticVector SemanticVector::from_detections(int concept_count, std::uint32_t concept_mask) {
  const std::uint32_t concept_bits = (1U << concept_count) - 1U;
  concept_mask &= concept_bits;
  const std::uint32_t unknown_bit = concept_mask == 0 ? (1U << concept_count) : 0U;
  return SemanticVector(concept_count, concept_mask | unknown_bit);
}

SemanticVector SemanticVector::from_raw(int concept_count, std::uint32_t node_mask) {
  const std::uint32_t node_bits = (concept_count >= 31) ? ~0U : ((1U << (concept_count + 1)) - 1U);
  return SemanticVector(concept_count, node_mask & node_bits);
}

SemanticVector SemanticVector::of(int concept_count, ConceptId id) {
  return from_raw(concept_count, 1U << id);
}

RelationObservation RelationObservation::make(ConceptId a, ConceptId b, bool value) {
  if (a > b) std::swap(a, b);
  return {a, b, value};
}

SmoothingFilter::SmoothingFilter(int concept_count, double threshold, int persistence)
    : concept_count_(concept_count),
      threshold_(threshold),
      persistence_(persistence),
      run_(static_cast<std::size_t>(concept_count), 0) {
  if (!(threshold > 0.0 && threshold <= 1.0)) throw std::invalid_argument("threshold must be in (0, 1]");
  if (persistence < 1) throw std::invalid_argument("persistence must be >= 1");
}

SemanticVector SmoothingFilter::push(const ConfidenceVector& frame) {
  if (frame.scores.size() != run_.size()) throw std::invalid_argument("confidence vector size mismatch");
  std::uint32_t mask = 0;
  for (std::size_t i = 0; i < run_.size(); ++i) {
    run_[i] = frame.scores[i] >= threshold_ ? run_[i] + 1 : 0;
    if (run_[i] >= persistence_) mask |= 1U << i;
  }
  return SemanticVector::from_detections(concept_count_, mask);
}

void SmoothingFilter::reset() { std::fill(run_.begin(), run_.end(), 0); }

std::vector<SemanticVector> smooth_filter(std::span<const ConfidenceVector> stream,
                                          int concept_count, double threshold, int persistence) {
  SmoothingFilter filter(concept_count, threshold, persistence);
  std::vector<SemanticVector> out;
  out.reserve(stream.size());
  for (const auto& frame : stream) out.push_back(filter.push(frame));
  return out;
}

SemanticVector bit_or(std::span<const SemanticVector> window) {
  if (window.empty()) throw std::invalid_argument("empty evidence window");
  std::uint32_t mask = 0;
  for (const auto& v : window) mask |= v.mask();
  return SemanticVector::from_raw(window.front().concept_count(), mask);
}

std::vector<RelationObservation> extract_observations(const SemanticVector& visited) {
  std::vector<RelationObservation> out;
  const int nodes = visited.node_count();
  for (ConceptId i = 0; i < nodes; ++i) {
    for (ConceptId j = i + 1; j < nodes; ++j) {
      const bool a = visited.test(i);
      const bool b = visited.test(j);
      if (a && b) {
        out.push_back({i, j, true});
      } else if (a != b) {
        out.push_back({i, j, false});
      }
    }
  }
  return out;
}

}  // namespace brm
