#include "brm_cli/commands.hpp"

#include <algorithm>
#include <filesystem>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "brm/errors.hpp"
#include "brm/eval.hpp"
#include "brm/relation_graph.hpp"
#include "brm_cli/corpus_io.hpp"

namespace brm::cli {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

RelationGraph load_graph(const std::string& path) {
  if (!fs::exists(path)) throw DataError("graph file not found: " + path);
  try {
    return deserialize(read_text_file(path));
  } catch (const ParseError& e) {
    throw DataError("bad graph file " + path + ": " + e.what());
  }
}

Corpus load_split(const RunConfig& config, std::string_view split) {
  return load_corpus(config.manifest_path(split), config.suite.sampling);
}

void require_same_vocabulary(const RelationGraph& graph, const Corpus& corpus) {
  if (graph.vocabulary() != corpus.vocabulary) {
    throw DataError("graph vocabulary does not match corpus '" + corpus.id + "'");
  }
}

std::string fixed(double v, int digits) {
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(digits) << v;
  return ss.str();
}

std::string_view action_name(Action a) {
  switch (a) {
    case Action::kUp:
      return "up";
    case Action::kDown:
      return "down";
    case Action::kLeft:
      return "left";
    case Action::kRight:
      return "right";
    case Action::kStay:
      return "stay";
  }
  return "?";
}

Json mask_names(const SemanticVector& v, const ConceptVocabulary& vocab) {
  Json names = Json::array();
  for (ConceptId i = 0; i < v.node_count(); ++i) {
    if (v.test(i)) names.push_back(i == vocab.unknown() ? std::string("unknown") : vocab.name(i));
  }
  return names;
}

Json posterior_matrix(const PairTable<double>& p) {
  const int n = p.node_count();
  Json rows = Json::array();
  for (int i = 0; i < n; ++i) {
    Json row = Json::array();
    for (int j = 0; j < n; ++j) row.push_back(i == j ? 0.0 : p.at(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

class TraceWriter : public EpisodeObserver {
 public:
  TraceWriter(std::ostream& out, const House& house, const ConceptVocabulary& vocab)
      : out_(out), house_(house), vocab_(vocab) {}

  void on_replan(const ReplanRecord& r) override {
    Json j;
    j["type"] = "replan";
    j["t"] = r.t;
    j["current"] = r.current.mask();
    j["current_names"] = mask_names(r.current, vocab_);
    j["evidence"] = r.evidence.mask();
    j["posterior"] = posterior_matrix(r.posterior);
    j["plan"] = {{"path", r.plan.path}, {"score", r.plan.score}};
    j["subgoal"] = r.subgoal;
    out_ << j.dump() << '\n';
  }

  void on_step(const StepRecord& s) override {
    const Cell c = house_.cell(s.cell);
    Json j;
    j["type"] = "step";
    j["t"] = s.t;
    j["cell"] = {c.x, c.y};
    j["room_concept"] = house_.concept_at(s.cell);
    j["smoothed"] = s.smoothed.mask();
    j["smoothed_names"] = mask_names(s.smoothed, vocab_);
    j["subgoal"] = s.subgoal;
    j["action"] = action_name(s.action);
    out_ << j.dump() << '\n';
  }

 private:
  std::ostream& out_;
  const House& house_;
  const ConceptVocabulary& vocab_;
};

}  // namespace

std::vector<AgentMode> parse_modes(std::string_view list) {
  std::vector<AgentMode> modes;
  std::size_t pos = 0;
  while (pos <= list.size()) {
    const std::size_t comma = std::min(list.find(',', pos), list.size());
    const std::string_view name = list.substr(pos, comma - pos);
    if (name.empty()) throw UsageError("empty mode name in '" + std::string(list) + "'");
    try {
      const AgentMode m = agent_mode_from_string(name);
      if (std::find(modes.begin(), modes.end(), m) == modes.end()) modes.push_back(m);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    pos = comma + 1;
  }
  return modes;
}

void cmd_gen_corpus(const RunConfig& config, bool force, std::ostream& log) {
  HouseParams params = config.corpus.house;
  if (!config.vocabulary.empty()) {
    try {
      params.vocabulary = ConceptVocabulary::from_json(read_text_file(config.vocabulary));
    } catch (const ParseError& e) {
      throw DataError("bad vocabulary file: " + std::string(e.what()));
    }
  }
  const CorpusSplits splits =
      default_splits(config.require_seed(), config.corpus.train, config.corpus.valid, config.corpus.test);
  const auto manifests = write_corpus(config.corpus.dir, splits, params, force);
  log << "wrote " << splits.train.size() << " train, " << splits.valid.size() << " valid, "
      << splits.test.size() << " test houses to " << config.corpus.dir << '\n';
  for (const auto& m : manifests) log << "  " << m << '\n';
}

void cmd_learn_prior(const RunConfig& config, std::ostream& log) {
  const Corpus train = load_split(config, "train");
  const PairTable<double> prior = learn_prior_driver(train, config.suite.sampling);
  const RelationGraph graph(train.vocabulary, prior);
  write_text_file(config.graph_path(), serialize(graph));

  const ConceptVocabulary& vocab = train.vocabulary;
  const int k = vocab.concept_count();
  log << "learned prior from " << train.size() << " houses -> " << config.graph_path() << '\n';
  for (ConceptId i = 0; i < k; ++i) {
    std::vector<std::pair<double, ConceptId>> row;
    for (ConceptId j = 0; j < k; ++j) {
      if (j != i) row.emplace_back(prior.at(i, j), j);
    }
    std::sort(row.begin(), row.end(), [](const auto& a, const auto& b) {
      return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    const std::size_t shown = std::min<std::size_t>(3, row.size());
    log << "  " << vocab.name(i) << "\n    top:";
    for (std::size_t r = 0; r < shown; ++r) log << ' ' << vocab.name(row[r].second) << '=' << fixed(row[r].first, 3);
    log << "\n    bottom:";
    for (std::size_t r = row.size() - shown; r < row.size(); ++r) {
      log << ' ' << vocab.name(row[r].second) << '=' << fixed(row[r].first, 3);
    }
    log << '\n';
  }
}

void cmd_tune(const RunConfig& config, std::ostream& log) {
  const std::string path = config.graph_path();
  if (!fs::exists(path)) throw DataError("no learned prior at " + path + "; run learn-prior first");
  RelationGraph graph = load_graph(path);
  const Corpus valid = load_split(config, "valid");
  require_same_vocabulary(graph, valid);

  const EvalSuite suite = build_eval_suite(valid, config.suite_params());
  AgentConfig agent = config.agent;
  agent.mode = AgentMode::kBrm;
  const auto grid = default_noise_grid();
  const GridSearchResult result = grid_search_obs(valid, suite, grid, graph, agent, config.run_settings());

  log << "grid search on " << valid.id << " (" << suite.episodes.size() << " episodes, H=" << agent.horizon
      << ", N=" << agent.replan_period << ")\n";
  log << "  psi_0     psi_1  success  spl\n";
  for (const auto& p : result.table) {
    log << "  " << std::left << std::setw(9) << fixed(p.noise.false_positive, 4) << std::setw(7)
        << fixed(p.noise.false_negative, 2) << std::setw(9) << fixed(p.success_rate, 3) << fixed(p.spl, 4)
        << std::right << '\n';
  }
  log << "chosen psi_0=" << result.best.false_positive << " psi_1=" << result.best.false_negative << '\n';

  graph.set_observation_noise(result.best);
  write_text_file(path, serialize(graph));
}

std::vector<std::string> cmd_eval(const RunConfig& config, const std::vector<AgentMode>& modes,
                                  std::ostream& log) {
  if (modes.empty()) throw UsageError("no modes selected");
  const RelationGraph graph = load_graph(config.graph_path());
  const Corpus test = load_split(config, "test");
  require_same_vocabulary(graph, test);
  const EvalSuite suite = build_eval_suite(test, config.suite_params());
  log << "suite: " << suite.episodes.size() << " episodes on " << test.size() << " houses\n";

  std::vector<std::string> written;
  for (const AgentMode mode : modes) {
    AgentConfig agent = config.agent;
    agent.mode = mode;
    const MetricsReport report = run_benchmark(test, suite, agent, graph, config.run_settings());
    const std::string stem = config.output_dir + "/report_" + std::string(to_string(mode));
    write_text_file(stem + ".json", report.to_json());
    write_text_file(stem + ".csv", report.to_csv());
    written.push_back(stem + ".json");
    written.push_back(stem + ".csv");
    log << "  " << std::left << std::setw(18) << to_string(mode) << std::right
        << " success " << fixed(report.overall.success_rate, 3) << "  spl " << fixed(report.overall.spl, 4) << '\n';
  }
  return written;
}

std::string cmd_trace(const RunConfig& config, const TraceOptions& options, std::ostream& log) {
  if (options.split != "train" && options.split != "valid" && options.split != "test") {
    throw UsageError("split must be train, valid or test");
  }
  const RelationGraph graph = load_graph(config.graph_path());
  const Corpus corpus = load_split(config, options.split);
  require_same_vocabulary(graph, corpus);
  const EvalSuite suite = build_eval_suite(corpus, config.suite_params());
  if (suite.episodes.empty()) throw DataError("suite is empty");

  std::size_t index = options.episode_index.value_or(0);
  if (options.episode_seed) {
    const auto it = std::find_if(suite.episodes.begin(), suite.episodes.end(),
                                 [&](const EpisodeConfig& e) { return e.rng_seed == *options.episode_seed; });
    if (it == suite.episodes.end()) throw DataError("no episode with seed " + std::to_string(*options.episode_seed));
    index = static_cast<std::size_t>(it - suite.episodes.begin());
  }
  if (index >= suite.episodes.size()) {
    throw UsageError("episode index out of range (suite has " + std::to_string(suite.episodes.size()) + ")");
  }
  const EpisodeConfig& episode = suite.episodes[index];
  const CorpusEntry& entry = corpus.entries.at(static_cast<std::size_t>(episode.house_index));
  const RunSettings settings = config.run_settings();
  const EpisodeContext context{entry.world, &entry.truth, settings.detector, settings.locomotion};

  std::ostringstream out;
  const ObservationNoise noise = graph.shared_observation_noise();
  Json header;
  header["type"] = "header";
  header["vocabulary"] = graph.vocabulary().names();
  header["mode"] = to_string(config.agent.mode);
  header["termination"] = to_string(config.agent.termination);
  header["horizon"] = config.agent.horizon;
  header["replan_period"] = config.agent.replan_period;
  header["corpus"] = corpus.id;
  header["episode_index"] = index;
  header["house_seed"] = episode.house_seed;
  header["start"] = {episode.start.x, episode.start.y};
  header["target"] = episode.target;
  header["target_name"] = graph.vocabulary().name(episode.target);
  header["rng_seed"] = episode.rng_seed;
  header["plan_distance"] = episode.plan_distance;
  header["shortest_path"] = episode.shortest_path;
  header["noise"] = {{"psi_0", noise.false_positive}, {"psi_1", noise.false_negative}};
  out << header.dump() << '\n';

  TraceWriter writer(out, entry.world.house(), graph.vocabulary());
  const EpisodeResult result = run_episode(context, episode, config.agent, graph, &writer);
  Json tail;
  tail["type"] = "result";
  tail["success"] = result.success;
  tail["steps"] = result.steps_taken;
  tail["shortest_path"] = result.shortest_path;
  out << tail.dump() << '\n';

  const std::string path = options.out.empty() ? config.output_dir + "/trace.jsonl" : options.out;
  write_text_file(path, out.str());
  log << "episode " << index << " (target " << graph.vocabulary().name(episode.target) << "): "
      << (result.success ? "success" : "failure") << " after " << result.steps_taken << " steps -> " << path << '\n';
  return path;
}

TraceCheck verify_trace(std::istream& in) {
  TraceCheck check;
  std::string line;
  std::optional<ConceptId> target;
  AgentMode mode = AgentMode::kBrm;
  int concept_count = 0;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const Json j = Json::parse(line);
      const std::string type = j.at("type").get<std::string>();
      if (type == "header") {
        target = j.at("target").get<ConceptId>();
        mode = agent_mode_from_string(j.at("mode").get<std::string>());
        concept_count = static_cast<int>(j.at("vocabulary").size());
      } else if (type == "replan") {
        if (!target) throw DataError("replan record before header");
        const auto& rows = j.at("posterior");
        const int n = static_cast<int>(rows.size());
        if (n != concept_count + 1) throw DataError("posterior size does not match vocabulary");
        PairTable<double> posterior(n);
        for (std::size_t k = 0; k < posterior.size(); ++k) {
          const auto [a, b] = posterior.pair_at(k);
          posterior[k] = rows.at(static_cast<std::size_t>(a)).at(static_cast<std::size_t>(b)).get<double>();
        }
        const auto current = SemanticVector::from_raw(concept_count, j.at("current").get<std::uint32_t>());
        const Plan p = plan(posterior, current, *target);
        const ConceptId subgoal = select_subgoal(p, *target, mode);
        ++check.replans;
        const auto recorded_path = j.at("plan").at("path").get<std::vector<ConceptId>>();
        if (subgoal != j.at("subgoal").get<ConceptId>() || p.path != recorded_path) ++check.mismatches;
      }
    } catch (const Json::exception& e) {
      throw DataError("trace line " + std::to_string(line_no) + ": " + e.what());
    } catch (const std::invalid_argument& e) {
      throw DataError("trace line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!target) throw DataError("trace has no header");
  return check;
}

}  // namespace brm::cli
