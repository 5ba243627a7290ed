#include "brm_cli/run_config.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>

#include <json.hpp>

namespace brm::cli {

namespace {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

void check_keys(const Json& obj, std::string_view where, std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) throw DataError(std::string(where) + ": expected an object");
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (auto a : allowed) known = known || a == key;
    if (!known) throw DataError(std::string(where) + ": unknown key '" + key + "'");
  }
}

template <typename T>
void read(const Json& obj, const char* key, T& out, std::string_view where) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const Json::exception&) {
    throw DataError(std::string(where) + "." + key + ": wrong type");
  }
}

void read_house(const Json& obj, HouseParams& house) {
  check_keys(obj, "corpus.house", {"width", "height", "min_room", "extra_door_probability"});
  read(obj, "width", house.width, "corpus.house");
  read(obj, "height", house.height, "corpus.house");
  read(obj, "min_room", house.min_room, "corpus.house");
  read(obj, "extra_door_probability", house.extra_door_probability, "corpus.house");
}

}  // namespace

std::string RunConfig::manifest_path(std::string_view split) const {
  const std::string& explicit_path = split == "train" ? train_manifest
                                     : split == "valid" ? valid_manifest
                                                        : test_manifest;
  if (!explicit_path.empty()) return explicit_path;
  return corpus.dir + "/" + std::string(split) + ".json";
}

std::string RunConfig::graph_path() const { return graph.empty() ? output_dir + "/graph.json" : graph; }

std::uint64_t RunConfig::require_seed() const {
  if (!seed) throw UsageError("a seed is required (config \"seed\" or --seed)");
  return *seed;
}

SuiteParams RunConfig::suite_params() const {
  SuiteParams p = suite;
  p.seed = suite_seed.value_or(require_seed());
  return p;
}

RunSettings RunConfig::run_settings() const {
  RunSettings s;
  s.detector = detector;
  s.locomotion = locomotion;
  s.jobs = jobs;
  return s;
}

void RunConfig::validate() const {
  try {
    detector.validate();
    locomotion.validate();
    agent.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (jobs < 1) throw UsageError("jobs must be >= 1");
  if (corpus.train < 1 || corpus.valid < 1 || corpus.test < 1) throw UsageError("corpus split sizes must be >= 1");
  if (suite.episodes_total < 1 || suite.min_per_bucket < 1) throw UsageError("suite sizes must be >= 1");
  if (suite.sampling.budget < 1 || suite.sampling.trials < 1) throw UsageError("sampling budget and trials must be >= 1");
}

std::string RunConfig::to_json() const {
  OrderedJson doc;
  if (seed) doc["seed"] = *seed;
  doc["output_dir"] = output_dir;
  doc["corpus"] = {{"dir", corpus.dir},
                   {"train", corpus.train},
                   {"valid", corpus.valid},
                   {"test", corpus.test},
                   {"house",
                    {{"width", corpus.house.width},
                     {"height", corpus.house.height},
                     {"min_room", corpus.house.min_room},
                     {"extra_door_probability", corpus.house.extra_door_probability}}}};
  doc["manifests"] = {{"train", manifest_path("train")},
                      {"valid", manifest_path("valid")},
                      {"test", manifest_path("test")}};
  if (!vocabulary.empty()) doc["vocabulary"] = vocabulary;
  doc["graph"] = graph_path();
  doc["detector"] = {{"hit_rate", detector.hit_rate}, {"false_alarm_rate", detector.false_alarm_rate}};
  doc["locomotion"] = {{"kind", std::string(to_string(locomotion.kind))},
                       {"sight_radius", locomotion.sight_radius},
                       {"slip", locomotion.slip},
                       {"explore_greed", locomotion.explore_greed}};
  doc["agent"] = {{"mode", std::string(to_string(agent.mode))},
                  {"horizon", agent.horizon},
                  {"replan_period", agent.replan_period},
                  {"termination", std::string(to_string(agent.termination))},
                  {"unknown_evidence", agent.unknown_evidence}};
  doc["suite"] = {{"episodes_total", suite.episodes_total},
                  {"min_per_bucket", suite.min_per_bucket},
                  {"max_attempts", suite.max_attempts}};
  if (suite_seed) doc["suite"]["seed"] = *suite_seed;
  doc["sampling"] = {{"budget", suite.sampling.budget}, {"trials", suite.sampling.trials}};
  doc["jobs"] = jobs;
  return doc.dump(2) + "\n";
}

RunConfig parse_run_config(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw DataError(std::string("config: ") + e.what());
  }
  check_keys(doc, "config",
             {"seed", "output_dir", "corpus", "manifests", "vocabulary", "graph", "detector", "locomotion", "agent",
              "suite", "sampling", "jobs"});

  RunConfig cfg;
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned()) throw DataError("config.seed: expected a non-negative integer");
    cfg.seed = doc["seed"].get<std::uint64_t>();
  }
  read(doc, "output_dir", cfg.output_dir, "config");
  read(doc, "vocabulary", cfg.vocabulary, "config");
  read(doc, "graph", cfg.graph, "config");
  read(doc, "jobs", cfg.jobs, "config");

  if (doc.contains("corpus")) {
    const Json& c = doc["corpus"];
    check_keys(c, "corpus", {"dir", "train", "valid", "test", "house"});
    read(c, "dir", cfg.corpus.dir, "corpus");
    read(c, "train", cfg.corpus.train, "corpus");
    read(c, "valid", cfg.corpus.valid, "corpus");
    read(c, "test", cfg.corpus.test, "corpus");
    if (c.contains("house")) read_house(c["house"], cfg.corpus.house);
  }
  if (doc.contains("manifests")) {
    const Json& m = doc["manifests"];
    check_keys(m, "manifests", {"train", "valid", "test"});
    read(m, "train", cfg.train_manifest, "manifests");
    read(m, "valid", cfg.valid_manifest, "manifests");
    read(m, "test", cfg.test_manifest, "manifests");
  }
  if (doc.contains("detector")) {
    const Json& d = doc["detector"];
    check_keys(d, "detector", {"hit_rate", "false_alarm_rate"});
    read(d, "hit_rate", cfg.detector.hit_rate, "detector");
    read(d, "false_alarm_rate", cfg.detector.false_alarm_rate, "detector");
  }
  if (doc.contains("locomotion")) {
    const Json& l = doc["locomotion"];
    check_keys(l, "locomotion", {"kind", "sight_radius", "slip", "explore_greed"});
    if (l.contains("kind")) {
      std::string kind;
      read(l, "kind", kind, "locomotion");
      try {
        cfg.locomotion = kind == "oracle" ? LocomotionSpec::oracle() : cfg.locomotion;
        cfg.locomotion.kind = locomotion_kind_from_string(kind);
      } catch (const std::invalid_argument& e) {
        throw DataError(e.what());
      }
    }
    read(l, "sight_radius", cfg.locomotion.sight_radius, "locomotion");
    read(l, "slip", cfg.locomotion.slip, "locomotion");
    read(l, "explore_greed", cfg.locomotion.explore_greed, "locomotion");
  }
  if (doc.contains("agent")) {
    const Json& a = doc["agent"];
    check_keys(a, "agent", {"mode", "horizon", "replan_period", "termination", "unknown_evidence"});
    try {
      if (a.contains("mode")) cfg.agent.mode = agent_mode_from_string(a["mode"].get<std::string>());
      if (a.contains("termination")) {
        cfg.agent.termination = termination_from_string(a["termination"].get<std::string>());
      }
    } catch (const std::invalid_argument& e) {
      throw DataError(e.what());
    } catch (const Json::exception&) {
      throw DataError("agent.mode and agent.termination must be strings");
    }
    read(a, "horizon", cfg.agent.horizon, "agent");
    read(a, "replan_period", cfg.agent.replan_period, "agent");
    read(a, "unknown_evidence", cfg.agent.unknown_evidence, "agent");
  }
  if (doc.contains("suite")) {
    const Json& s = doc["suite"];
    check_keys(s, "suite", {"episodes_total", "min_per_bucket", "max_attempts", "seed"});
    read(s, "episodes_total", cfg.suite.episodes_total, "suite");
    read(s, "min_per_bucket", cfg.suite.min_per_bucket, "suite");
    read(s, "max_attempts", cfg.suite.max_attempts, "suite");
    if (s.contains("seed")) {
      std::uint64_t v = 0;
      read(s, "seed", v, "suite");
      cfg.suite_seed = v;
    }
  }
  if (doc.contains("sampling")) {
    const Json& s = doc["sampling"];
    check_keys(s, "sampling", {"budget", "trials"});
    read(s, "budget", cfg.suite.sampling.budget, "sampling");
    read(s, "trials", cfg.suite.sampling.trials, "sampling");
  }
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str());
}

}  // namespace brm::cli
