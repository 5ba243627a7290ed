#include "brm_cli/app.hpp"

#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>

#include <CLI11.hpp>

#include "brm_cli/commands.hpp"
#include "brm_cli/run_config.hpp"

namespace brm::cli {

namespace {

struct Flags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output_dir;
  std::optional<int> jobs;

  std::optional<std::string> corpus_dir;
  std::optional<std::string> graph;
  bool force = false;

  std::string modes = "brm,pure,random";
  std::optional<int> horizon;
  std::optional<int> replan;
  std::optional<std::string> termination;
  std::optional<std::string> mode;

  TraceOptions trace;
  std::optional<std::size_t> episode_index;
  std::optional<std::uint64_t> episode_seed;
  std::string verify;
};

RunConfig resolve_config(const Flags& f) {
  RunConfig cfg;
  if (!f.config_path.empty()) cfg = load_run_config(f.config_path);
  if (const char* env = std::getenv(kOutputDirEnv); env != nullptr && *env != '\0') cfg.output_dir = env;
  if (f.seed) cfg.seed = f.seed;
  if (f.output_dir) cfg.output_dir = *f.output_dir;
  if (f.jobs) cfg.jobs = *f.jobs;
  if (f.corpus_dir) cfg.corpus.dir = *f.corpus_dir;
  if (f.graph) cfg.graph = *f.graph;
  if (f.horizon) cfg.agent.horizon = *f.horizon;
  if (f.replan) cfg.agent.replan_period = *f.replan;
  try {
    if (f.termination) cfg.agent.termination = termination_from_string(*f.termination);
    if (f.mode) cfg.agent.mode = agent_mode_from_string(*f.mode);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  cfg.validate();
  cfg.require_seed();
  return cfg;
}

}  // namespace

int run_app(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Relational-memory navigation experiments", "brm"};
  app.require_subcommand(1);
  Flags f;
  app.add_option("-c,--config", f.config_path, "Run config JSON file");
  app.add_option("--seed", f.seed, "Global seed (required here or in the config)");
  app.add_option("-o,--output-dir", f.output_dir, "Output directory");
  app.add_option("-j,--jobs", f.jobs, "Worker threads")->check(CLI::PositiveNumber);

  auto* gen = app.add_subcommand("gen-corpus", "Generate train/valid/test houses and manifests");
  gen->add_option("--corpus-dir", f.corpus_dir, "Corpus directory");
  gen->add_flag("--force", f.force, "Overwrite a non-empty corpus directory");

  auto* learn = app.add_subcommand("learn-prior", "Fit the relation prior on the train split");
  learn->add_option("--corpus-dir", f.corpus_dir, "Corpus directory");
  learn->add_option("--graph", f.graph, "Graph file to write");

  auto* tune = app.add_subcommand("tune", "Grid-search the observation channel on the valid split");
  tune->add_option("--corpus-dir", f.corpus_dir, "Corpus directory");
  tune->add_option("--graph", f.graph, "Graph file to read and update");
  tune->add_option("--horizon", f.horizon, "Episode horizon H");
  tune->add_option("--replan", f.replan, "Replan period N");

  auto* eval = app.add_subcommand("eval", "Benchmark agents on the test split");
  eval->add_option("--corpus-dir", f.corpus_dir, "Corpus directory");
  eval->add_option("--graph", f.graph, "Graph file");
  eval->add_option("--modes", f.modes, "Comma-separated agent modes")->capture_default_str();
  eval->add_option("--horizon", f.horizon, "Episode horizon H");
  eval->add_option("--replan", f.replan, "Replan period N");
  eval->add_option("--termination", f.termination, "environment or self");
  eval->add_option("-j,--jobs", f.jobs, "Worker threads")->check(CLI::PositiveNumber);

  auto* trace = app.add_subcommand("trace", "Dump one episode as JSON lines");
  trace->add_option("--corpus-dir", f.corpus_dir, "Corpus directory");
  trace->add_option("--graph", f.graph, "Graph file");
  trace->add_option("--split", f.trace.split, "Split to draw the episode from")->capture_default_str();
  auto* by_index = trace->add_option("--episode", f.episode_index, "Episode index in the suite");
  trace->add_option("--episode-seed", f.episode_seed, "Episode rng seed")->excludes(by_index);
  trace->add_option("--mode", f.mode, "Agent mode");
  trace->add_option("--horizon", f.horizon, "Episode horizon H");
  trace->add_option("--replan", f.replan, "Replan period N");
  trace->add_option("--termination", f.termination, "environment or self");
  trace->add_option("--out", f.trace.out, "Trace file (default <output-dir>/trace.jsonl)");
  trace->add_option("--verify", f.verify, "Replay an existing trace instead of running one");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }

  try {
    if (trace->parsed() && !f.verify.empty()) {
      std::ifstream in(f.verify, std::ios::binary);
      if (!in) throw DataError("cannot read " + f.verify);
      const TraceCheck check = verify_trace(in);
      out << "replans: " << check.replans << ", mismatches: " << check.mismatches << '\n';
      return check.mismatches == 0 ? 0 : 2;
    }

    const RunConfig cfg = resolve_config(f);
    if (gen->parsed()) {
      cmd_gen_corpus(cfg, f.force, out);
    } else if (learn->parsed()) {
      cmd_learn_prior(cfg, out);
    } else if (tune->parsed()) {
      cmd_tune(cfg, out);
    } else if (eval->parsed()) {
      cmd_eval(cfg, parse_modes(f.modes), out);
    } else if (trace->parsed()) {
      f.trace.episode_index = f.episode_index;
      f.trace.episode_seed = f.episode_seed;
      cmd_trace(cfg, f.trace, out);
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

}  // namespace brm::cli
