#pragma once

#include <bit>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace brm {

/// Dense concept id. Ids 0..K-1 are named concepts, id K is "unknown".
using ConceptId = int;

/// Ordered set of K semantic concepts plus the implicit "unknown" node.
class ConceptVocabulary {
 public:
  static constexpr int kMaxConcepts = 31;

  /// The eight default room types.
  ConceptVocabulary();
  explicit ConceptVocabulary(std::vector<std::string> names);

  int concept_count() const { return static_cast<int>(names_.size()); }
  int node_count() const { return concept_count() + 1; }
  ConceptId unknown() const { return concept_count(); }

  /// Returns "unknown" for the unknown id.
  const std::string& name(ConceptId id) const;
  std::optional<ConceptId> find(std::string_view name) const;
  const std::vector<std::string>& names() const { return names_; }

  /// JSON array of names; concept id = array index.
  std::string to_json() const;
  static ConceptVocabulary from_json(std::string_view text);

  friend bool operator==(const ConceptVocabulary&, const ConceptVocabulary&) = default;

 private:
  std::vector<std::string> names_;
};

/// Per-concept detector confidences in [0, 1], one per named concept.
struct ConfidenceVector {
  std::vector<double> scores;
};

/// K+1 binary flags. Built from detections, the unknown bit is set iff no
/// concept bit is set. Raw vectors (bit-OR results) skip that normalization.
class SemanticVector {
 public:
  SemanticVector() = default;

  static SemanticVector from_detections(int concept_count, std::uint32_t concept_mask);
  static SemanticVector from_raw(int concept_count, std::uint32_t node_mask);
  static SemanticVector of(int concept_count, ConceptId id);

  int concept_count() const { return concept_count_; }
  int node_count() const { return concept_count_ + 1; }
  std::uint32_t mask() const { return mask_; }
  bool test(ConceptId id) const { return (mask_ >> id) & 1U; }
  bool unknown() const { return test(concept_count_); }
  int popcount() const { return std::popcount(mask_); }
  bool none() const { return mask_ == 0; }

  friend bool operator==(const SemanticVector&, const SemanticVector&) = default;

 private:
  SemanticVector(int concept_count, std::uint32_t mask)
      : concept_count_(concept_count), mask_(mask) {}

  int concept_count_ = 0;
  std::uint32_t mask_ = 0;
};

/// A noisy binary sample y of the relation between concepts i < j.
struct RelationObservation {
  ConceptId i = 0;
  ConceptId j = 0;
  bool value = false;

  /// Canonicalizes the pair so that i < j.
  static RelationObservation make(ConceptId a, ConceptId b, bool value);

  friend bool operator==(const RelationObservation&, const RelationObservation&) = default;
};

/// Streaming version of smooth_filter. A concept bit is on while its score
/// has stayed >= threshold for the last `persistence` frames.
class SmoothingFilter {
 public:
  explicit SmoothingFilter(int concept_count, double threshold = 0.9, int persistence = 3);

  SemanticVector push(const ConfidenceVector& frame);
  void reset();

  double threshold() const { return threshold_; }
  int persistence() const { return persistence_; }

 private:
  int concept_count_;
  double threshold_;
  int persistence_;
  std::vector<int> run_;
};

std::vector<SemanticVector> smooth_filter(std::span<const ConfidenceVector> stream,
                                          int concept_count, double threshold = 0.9,
                                          int persistence = 3);

/// Union of a window of semantic vectors. Throws on an empty window.
SemanticVector bit_or(std::span<const SemanticVector> window);

/// Relation samples implied by a bit-OR vector: both set gives y=1, exactly
/// one set gives y=0, both clear gives nothing.
std::vector<RelationObservation> extract_observations(const SemanticVector& visited);

}  // namespace brm
