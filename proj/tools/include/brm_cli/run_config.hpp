#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "brm/agent.hpp"
#include "brm/eval.hpp"
#include "brm/house.hpp"
#include "brm/locomotion.hpp"
#include "brm/world.hpp"

namespace brm::cli {

/// Bad command line or config values. Maps to exit code 1.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Missing or malformed input data, or a refused operation. Exit code 2.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CorpusConfig {
  std::string dir = "corpus";
  int train = 200;
  int valid = 20;
  int test = 50;
  HouseParams house;
};

struct RunConfig {
  std::optional<std::uint64_t> seed;  // required before any command runs
  std::string output_dir = "out";
  CorpusConfig corpus;
  // Manifest paths; empty means <corpus.dir>/<split>.json.
  std::string train_manifest;
  std::string valid_manifest;
  std::string test_manifest;
  std::string vocabulary;  // optional JSON array of concept names
  std::string graph;       // empty means <output_dir>/graph.json
  DetectorModel detector;
  LocomotionSpec locomotion;
  AgentConfig agent;
  SuiteParams suite;  // suite.seed is ignored; see suite_seed
  std::optional<std::uint64_t> suite_seed;  // defaults to the global seed
  int jobs = 1;

  std::string manifest_path(std::string_view split) const;
  std::string graph_path() const;
  std::uint64_t require_seed() const;

  /// Suite parameters with the suite seed tied to the global seed.
  SuiteParams suite_params() const;
  RunSettings run_settings() const;

  /// Throws UsageError on out-of-range values.
  void validate() const;

  std::string to_json() const;
};

/// Parses a config file body. Missing keys keep their defaults; unknown keys
/// are rejected. Throws DataError on malformed JSON.
RunConfig parse_run_config(std::string_view text);
RunConfig load_run_config(const std::string& path);

/// Name of the environment variable that overrides the output directory.
inline constexpr const char* kOutputDirEnv = "BRM_OUTPUT_DIR";

}  // namespace brm::cli
