#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "brm/relation_graph.hpp"
#include "brm_cli/app.hpp"
#include "brm_cli/commands.hpp"
#include "brm_cli/corpus_io.hpp"
#include "brm_cli/run_config.hpp"

namespace brm::cli {
namespace {

namespace fs = std::filesystem;

constexpr const char* kSmallConfig = R"({
  "seed": 3,
  "corpus": {"train": 6, "valid": 3, "test": 3},
  "suite": {"episodes_total": 40, "min_per_bucket": 1}
})";

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("brm_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    config_ = (dir_ / "config.json").string();
    std::ofstream(config_) << kSmallConfig;
    ::unsetenv(kOutputDirEnv);
  }
  void TearDown() override {
    ::unsetenv(kOutputDirEnv);
    fs::remove_all(dir_);
  }

  int run(std::vector<std::string> args) {
    out_.str("");
    err_.str("");
    return run_app(args, out_, err_);
  }

  // Base arguments pointing every path into the test directory.
  std::vector<std::string> base(const std::string& command) const {
    return {"--config", config_, "-o", (dir_ / "out").string(), command, "--corpus-dir", (dir_ / "corpus").string()};
  }

  void prepare(bool tuned = false) {
    ASSERT_EQ(run(base("gen-corpus")), 0) << err_.str();
    ASSERT_EQ(run(base("learn-prior")), 0) << err_.str();
    if (tuned) {
      ASSERT_EQ(run(base("tune")), 0) << err_.str();
    }
  }

  static std::string slurp(const fs::path& p) { return read_text_file(p.string()); }

  fs::path dir_;
  std::string config_;
  std::ostringstream out_;
  std::ostringstream err_;
};

TEST(RunConfig, ParsesAndRejectsUnknownKeys) {
  const RunConfig c = parse_run_config(R"({"seed": 9, "agent": {"mode": "pure", "horizon": 1000},
    "locomotion": {"kind": "oracle"}, "detector": {"hit_rate": 0.9}, "jobs": 2})");
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.agent.mode, AgentMode::kPure);
  EXPECT_EQ(c.agent.horizon, 1000);
  EXPECT_EQ(c.locomotion.kind, LocomotionKind::kOracle);
  EXPECT_EQ(c.locomotion.slip, 0.0);
  EXPECT_DOUBLE_EQ(c.detector.hit_rate, 0.9);
  EXPECT_EQ(c.jobs, 2);
  EXPECT_THROW(parse_run_config(R"({"seed": 1, "colour": 2})"), DataError);
  EXPECT_THROW(parse_run_config(R"({"agent": {"mode": "rnn"}})"), DataError);
  EXPECT_THROW(parse_run_config(R"({"seed": "x"})"), DataError);
  EXPECT_THROW(parse_run_config("{"), DataError);
}

TEST(RunConfig, SeedIsMandatory) {
  RunConfig c;
  EXPECT_THROW(c.require_seed(), UsageError);
  c.seed = 4;
  EXPECT_EQ(c.suite_params().seed, 4u);
  c.suite_seed = 8;
  EXPECT_EQ(c.suite_params().seed, 8u);
}

TEST(RunConfig, DumpParsesBack) {
  RunConfig c = parse_run_config(kSmallConfig);
  const RunConfig back = parse_run_config(c.to_json());
  EXPECT_EQ(back.to_json(), c.to_json());
}

TEST(Modes, Parse) {
  EXPECT_EQ(parse_modes("brm,pure"), (std::vector<AgentMode>{AgentMode::kBrm, AgentMode::kPure}));
  EXPECT_THROW(parse_modes("brm,,pure"), UsageError);
  EXPECT_THROW(parse_modes("rnn"), UsageError);
}

TEST_F(CliTest, UsageErrorsExitOne) {
  EXPECT_EQ(run({}), 1);
  EXPECT_EQ(run({"frobnicate"}), 1);
  EXPECT_EQ(run({"gen-corpus", "--corpus-dir", (dir_ / "c").string()}), 1);  // no seed
  EXPECT_NE(err_.str().find("seed"), std::string::npos);
  EXPECT_EQ(run({"--seed", "1", "eval", "--modes", "rnn"}), 1);
  EXPECT_EQ(run({"--help"}), 0);
}

TEST_F(CliTest, GenCorpusWritesSplitsAndIsIdempotent) {
  ASSERT_EQ(run(base("gen-corpus")), 0) << err_.str();
  const Manifest train = read_manifest((dir_ / "corpus" / "train.json").string());
  EXPECT_EQ(train.houses.size(), 6u);
  EXPECT_EQ(read_manifest((dir_ / "corpus" / "test.json").string()).houses.size(), 3u);
  const std::string first = slurp(dir_ / "corpus" / "houses" / "valid_002.json");

  EXPECT_EQ(run(base("gen-corpus")), 2);  // refuses a non-empty directory
  auto forced = base("gen-corpus");
  forced.push_back("--force");
  ASSERT_EQ(run(forced), 0) << err_.str();
  EXPECT_EQ(slurp(dir_ / "corpus" / "houses" / "valid_002.json"), first);

  // Loading from disk gives the same houses as generating from the seeds.
  const Corpus loaded = load_corpus((dir_ / "corpus" / "train.json").string(), RelationSampling{});
  for (std::size_t i = 0; i < loaded.size(); ++i) {
    EXPECT_EQ(loaded.entries[i].world.house(), generate_house(train.houses[i].seed, HouseParams{}));
  }
}

TEST_F(CliTest, DefaultCorpusSizes) {
  std::ofstream(config_) << R"({"seed": 1})";
  ASSERT_EQ(run(base("gen-corpus")), 0) << err_.str();
  EXPECT_EQ(read_manifest((dir_ / "corpus" / "train.json").string()).houses.size(), 200u);
  EXPECT_EQ(read_manifest((dir_ / "corpus" / "valid.json").string()).houses.size(), 20u);
  EXPECT_EQ(read_manifest((dir_ / "corpus" / "test.json").string()).houses.size(), 50u);
}

TEST_F(CliTest, LearnPriorNeedsManifest) {
  EXPECT_EQ(run(base("learn-prior")), 2);
  EXPECT_NE(err_.str().find("manifest not found"), std::string::npos);
}

TEST_F(CliTest, LearnPriorWritesParseableGraph) {
  prepare();
  const RelationGraph g = deserialize(slurp(dir_ / "out" / "graph.json"));
  EXPECT_EQ(g.vocabulary(), ConceptVocabulary{});
  EXPECT_NE(out_.str().find("top:"), std::string::npos);
  EXPECT_NE(out_.str().find("bottom:"), std::string::npos);
}

TEST_F(CliTest, TuneRefusesWithoutPriorAndWritesNoise) {
  ASSERT_EQ(run(base("gen-corpus")), 0);
  EXPECT_EQ(run(base("tune")), 2);
  EXPECT_NE(err_.str().find("learn-prior"), std::string::npos);
  ASSERT_EQ(run(base("learn-prior")), 0);
  const RelationGraph before = deserialize(slurp(dir_ / "out" / "graph.json"));
  ASSERT_EQ(run(base("tune")), 0) << err_.str();
  const RelationGraph after = deserialize(slurp(dir_ / "out" / "graph.json"));
  EXPECT_EQ(after.priors(), before.priors());
  // The whole grid is logged, one row per candidate.
  std::istringstream log(out_.str());
  int rows = 0;
  for (std::string line; std::getline(log, line);) rows += line.rfind("  0.", 0) == 0 ? 1 : 0;
  EXPECT_EQ(rows, 16);
  const auto grid = default_noise_grid();
  EXPECT_NE(std::find(grid.begin(), grid.end(), after.shared_observation_noise()), grid.end());
}

TEST_F(CliTest, EvalWritesReportsDeterministically) {
  prepare();
  auto one = base("eval");
  one.insert(one.end(), {"--modes", "brm,pure", "--jobs", "1"});
  ASSERT_EQ(run(one), 0) << err_.str();
  const std::string json1 = slurp(dir_ / "out" / "report_brm.json");
  const std::string csv1 = slurp(dir_ / "out" / "report_pure.csv");
  auto many = one;
  many.back() = "3";
  ASSERT_EQ(run(many), 0) << err_.str();
  EXPECT_EQ(slurp(dir_ / "out" / "report_brm.json"), json1);
  EXPECT_EQ(slurp(dir_ / "out" / "report_pure.csv"), csv1);
}

TEST_F(CliTest, EvalFlagsOverrideConfig) {
  prepare();
  auto args = base("eval");
  args.insert(args.end(), {"--modes", "brm", "--horizon", "120", "--replan", "30", "--termination", "self"});
  ASSERT_EQ(run(args), 0) << err_.str();
  const std::string json = slurp(dir_ / "out" / "report_brm.json");
  EXPECT_NE(json.find("\"horizon\": 120"), std::string::npos);
  EXPECT_NE(json.find("\"replan_period\": 30"), std::string::npos);
  EXPECT_NE(json.find("\"termination\": \"self\""), std::string::npos);
  args.insert(args.end(), {"--replan", "500"});
  EXPECT_EQ(run(args), 1);  // N > H
}

TEST_F(CliTest, OutputDirPrecedence) {
  ASSERT_EQ(run(base("gen-corpus")), 0);
  std::ofstream(config_) << R"({"seed": 3, "corpus": {"train": 6, "valid": 3, "test": 3},
    "output_dir": ")" + (dir_ / "from_config").string() + "\"}";
  const std::vector<std::string> no_flag{"--config", config_, "learn-prior", "--corpus-dir", (dir_ / "corpus").string()};
  ASSERT_EQ(run(no_flag), 0) << err_.str();
  EXPECT_TRUE(fs::exists(dir_ / "from_config" / "graph.json"));

  ::setenv(kOutputDirEnv, (dir_ / "from_env").c_str(), 1);
  ASSERT_EQ(run(no_flag), 0);
  EXPECT_TRUE(fs::exists(dir_ / "from_env" / "graph.json"));

  std::vector<std::string> flagged = no_flag;
  flagged.insert(flagged.begin(), {"-o", (dir_ / "from_flag").string()});
  ASSERT_EQ(run(flagged), 0);
  EXPECT_TRUE(fs::exists(dir_ / "from_flag" / "graph.json"));
}

TEST_F(CliTest, TraceIsDeterministicAndReplays) {
  prepare();
  auto args = base("trace");
  args.insert(args.end(), {"--episode", "2", "--out", (dir_ / "a.jsonl").string()});
  ASSERT_EQ(run(args), 0) << err_.str();
  args.back() = (dir_ / "b.jsonl").string();
  ASSERT_EQ(run(args), 0);
  const std::string a = slurp(dir_ / "a.jsonl");
  EXPECT_EQ(a, slurp(dir_ / "b.jsonl"));

  std::istringstream lines(a);
  std::string line;
  std::getline(lines, line);
  EXPECT_NE(line.find("\"type\":\"header\""), std::string::npos);
  int steps = 0, replans = 0;
  std::string last;
  while (std::getline(lines, line)) {
    steps += line.find("\"type\":\"step\"") != std::string::npos ? 1 : 0;
    replans += line.find("\"type\":\"replan\"") != std::string::npos ? 1 : 0;
    last = line;
  }
  EXPECT_GT(steps, 0);
  EXPECT_GT(replans, 0);
  EXPECT_NE(last.find("\"type\":\"result\""), std::string::npos);

  std::ifstream in(dir_ / "a.jsonl");
  const TraceCheck check = verify_trace(in);
  EXPECT_EQ(check.replans, replans);
  EXPECT_EQ(check.mismatches, 0);
  EXPECT_EQ(run({"trace", "--verify", (dir_ / "a.jsonl").string()}), 0);
}

TEST_F(CliTest, TraceVerifyCatchesTampering) {
  prepare();
  auto args = base("trace");
  args.insert(args.end(), {"--episode", "0", "--out", (dir_ / "t.jsonl").string()});
  ASSERT_EQ(run(args), 0);
  std::string text = slurp(dir_ / "t.jsonl");
  const auto pos = text.find("\"subgoal\":", text.find("\"type\":\"replan\""));
  ASSERT_NE(pos, std::string::npos);
  const auto digit = pos + 10;
  text[digit] = text[digit] == '7' ? '6' : '7';
  std::ofstream(dir_ / "t.jsonl", std::ios::trunc) << text;
  EXPECT_EQ(run({"trace", "--verify", (dir_ / "t.jsonl").string()}), 2);
}

}  // namespace
}  // namespace brm::cli
