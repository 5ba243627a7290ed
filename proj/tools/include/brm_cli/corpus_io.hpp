#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "brm/concepts.hpp"
#include "brm/eval.hpp"
#include "brm/house.hpp"

namespace brm::cli {

struct ManifestEntry {
  std::uint64_t seed = 0;
  std::string file;  // relative to the manifest's directory
};

struct Manifest {
  std::string split;
  ConceptVocabulary vocabulary;
  HouseParams house_params;
  std::vector<ManifestEntry> houses;

  std::string to_json() const;
  static Manifest from_json(const std::string& text);
};

/// Writes houses/<split>_NNN.json plus <split>.json for each split under
/// `dir`. Refuses a non-empty directory unless `force` is set. Returns the
/// manifest paths in train, valid, test order.
std::vector<std::string> write_corpus(const std::string& dir, const CorpusSplits& splits,
                                      const HouseParams& params, bool force);

/// Reads a manifest and its house files. Throws DataError on missing or
/// malformed files.
Manifest read_manifest(const std::string& path);
Corpus load_corpus(const std::string& manifest_path, const RelationSampling& sampling);

std::string read_text_file(const std::string& path);
/// Writes via a temporary file and rename so readers never see partial files.
void write_text_file(const std::string& path, const std::string& text);

}  // namespace brm::cli
