#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "brm/agent.hpp"
#include "brm_cli/run_config.hpp"

namespace brm::cli {

void cmd_gen_corpus(const RunConfig& config, bool force, std::ostream& log);

/// Fits the edge prior on the train split and writes the graph file.
void cmd_learn_prior(const RunConfig& config, std::ostream& log);

/// Grid-searches the observation channel on the valid split and rewrites the
/// graph file with the winner.
void cmd_tune(const RunConfig& config, std::ostream& log);

/// Runs the test suite once per mode. Writes report_<mode>.json and .csv
/// under the output directory and returns the written paths.
std::vector<std::string> cmd_eval(const RunConfig& config, const std::vector<AgentMode>& modes,
                                  std::ostream& log);

struct TraceOptions {
  std::string split = "test";
  std::optional<std::size_t> episode_index;  // position in the suite
  std::optional<std::uint64_t> episode_seed;  // or the episode rng seed
  std::string out;  // empty means <output_dir>/trace.jsonl
};

/// Dumps one episode as JSON lines: a header, then replan and step records
/// in time order, then a result record. Returns the output path.
std::string cmd_trace(const RunConfig& config, const TraceOptions& options, std::ostream& log);

struct TraceCheck {
  int replans = 0;
  int mismatches = 0;
};

/// Recomputes the plan and sub-goal of every replan record from its stored
/// posterior and current vector.
TraceCheck verify_trace(std::istream& in);

/// Comma-separated mode names, e.g. "brm,pure".
std::vector<AgentMode> parse_modes(std::string_view list);

}  // namespace brm::cli
