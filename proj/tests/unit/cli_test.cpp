#include <gtest/gtest.h>

#include <sys/resource.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "rlvr/cli/app.hpp"
#include "rlvr/cli/manifest.hpp"
#include "rlvr/common/jsonl.hpp"

namespace {

namespace fs = std::filesystem;
using rlvr::json;

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "rlvr");
  std::ostringstream out, err;
  const int code = rlvr::cli::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("rlvr_cli_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string file(const std::string& name, const std::string& body) {
    const auto p = dir_ / name;
    std::ofstream(p) << body;
    return p.string();
  }
  std::string out(const std::string& name) const { return (dir_ / name).string(); }
  static std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    return {std::istreambuf_iterator<char>(in), {}};
  }
  static json read_json(const fs::path& p) { return json::parse(slurp(p)); }

  fs::path dir_;
};

const char* kMath3 =
    "{\"id\":\"a\",\"response\":\"so \\\\boxed{1/2}\",\"oracle\":\"0.5\"}\n"
    "{\"id\":\"b\",\"response\":\"\\\\boxed{3}\",\"oracle\":\"3\"}\n"
    "{\"id\":\"c\",\"response\":\"\\\\boxed{4}\",\"oracle\":\"3\"}\n";

TEST_F(Cli, VerifyMathSummary) {
  const auto r = run({"verify-math", "--in", file("m.jsonl", kMath3), "--out-dir", out("o"), "--workers", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto s = read_json(dir_ / "o" / "summary.json");
  EXPECT_NEAR(s["reward_rate"].get<double>(), 0.6667, 5e-5);
  EXPECT_EQ(s["reasons"]["MISMATCH"], 1);
  EXPECT_TRUE(s.contains("seconds_per_1024"));
  const auto m = read_json(dir_ / "o" / "manifest.json");
  EXPECT_EQ(m["command"], "verify-math");
  EXPECT_EQ(m["config_hash"].get<std::string>().size(), 64u);
  EXPECT_TRUE(m["artifacts"]["verdicts"].contains("sha256"));
}

TEST_F(Cli, VerifyMathEmptyAndMalformed) {
  auto r = run({"verify-math", "--in", file("e.jsonl", ""), "--out-dir", out("o")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(read_json(dir_ / "o" / "summary.json")["reward_rate"].is_null());
  r = run({"verify-math", "--in", file("b.jsonl", "{\"id\":\"a\",\"response\":\"x\",\"oracle\":\"1\"}\n{oops\n"),
           "--out-dir", out("o2")});
  EXPECT_EQ(r.code, rlvr::cli::kInputError);
  EXPECT_NE(r.err.find("b.jsonl:2"), std::string::npos) << r.err;
  EXPECT_EQ(read_json(dir_ / "o2" / "manifest.json")["exit_code"], 3);
}

TEST_F(Cli, VerifyMathConfigFileAndEnvironment) {
  const auto in = file("m.jsonl", "{\"k\":\"a\",\"text\":\"\\\\boxed{2}\",\"gold\":\"2\"}\n");
  const auto cfg = file("c.json", "{\"id_field\":\"k\",\"response_field\":\"text\",\"oracle_field\":\"gold\",\"in\":\"" + in + "\"}");
  ::setenv("RLVR_OUT_DIR", out("env").c_str(), 1);
  const auto r = run({"--config", cfg, "verify-math"});
  ::unsetenv("RLVR_OUT_DIR");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(slurp(dir_ / "env" / "verdicts.jsonl"), "{\"id\":\"a\",\"reason\":\"EXACT_EQUAL\",\"reward\":1}\n");
  EXPECT_EQ(run({"--config", file("bad.json", "{\"tolerance\":1}"), "verify-math", "--in", in, "--out-dir", out("x")}).code,
            rlvr::cli::kConfigError);
}

TEST_F(Cli, UsageErrorsAreConfigErrors) {
  EXPECT_EQ(run({}).code, rlvr::cli::kConfigError);
  EXPECT_EQ(run({"frobnicate"}).code, rlvr::cli::kConfigError);
  EXPECT_EQ(run({"--help"}).code, 0);
  EXPECT_EQ(run({"verify-math", "--out-dir", out("o")}).code, rlvr::cli::kConfigError);
}

const char* kProblems =
    "{\"id\":\"add\",\"statement\":\"a+b\",\"format\":\"STDIN_STDOUT\",\"tests\":["
    "{\"input\":\"1 2\\n\",\"expected_output\":\"3\\n\",\"time_limit_ms\":2000},"
    "{\"input\":\"5 5\\n\",\"expected_output\":\"10\\n\",\"time_limit_ms\":2000}]}\n"
    "{\"id\":\"neg\",\"statement\":\"-a\",\"format\":\"STDIN_STDOUT\",\"tests\":["
    "{\"input\":\"4\\n\",\"expected_output\":\"-4\\n\",\"time_limit_ms\":2000}]}\n";

std::string code_response(const std::string& src) {
  json j = "```python\n" + src + "\n```";
  return j.dump();
}

TEST_F(Cli, VerifyCodeGoodSolutionsAndTimeout) {
  const auto problems = file("p.jsonl", kProblems);
  const std::string good =
      "{\"id\":\"r1\",\"problem_id\":\"add\",\"response\":" + code_response("a,b=map(int,input().split())\nprint(a+b)") +
      "}\n{\"id\":\"r2\",\"problem_id\":\"neg\",\"response\":" + code_response("print(-int(input()))") + "}\n";
  auto r = run({"verify-code", "--problems", problems, "--responses", file("g.jsonl", good), "--out-dir", out("g")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(read_json(dir_ / "g" / "summary.json")["pass_rate"], 1.0);

  const std::string mixed = good + "{\"id\":\"r3\",\"problem_id\":\"neg\",\"response\":" +
                            code_response("while True:\n    pass") + "}\n{\"id\":\"r4\",\"problem_id\":\"add\",\"response\":" +
                            code_response("print(0)") + "}\n{\"id\":\"r5\",\"problem_id\":\"add\",\"response\":\"no code\"}\n";
  const auto responses = file("m.jsonl", mixed);
  r = run({"verify-code", "--problems", problems, "--responses", responses, "--time-limit-ms", "300", "--workers", "1",
           "--out-dir", out("w1")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto s = read_json(dir_ / "w1" / "summary.json");
  EXPECT_GE(s["taxonomy"]["TIMEOUT"].get<int>(), 1);
  EXPECT_EQ(s["taxonomy"]["WRONG_OUTPUT"], 1);
  EXPECT_EQ(s["taxonomy"]["NO_CODE"], 1);
  EXPECT_EQ(s["taxonomy"]["PASS"], 2);
  r = run({"verify-code", "--problems", problems, "--responses", responses, "--time-limit-ms", "300", "--workers", "8",
           "--out-dir", out("w8")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(slurp(dir_ / "w1" / "verdicts.jsonl"), slurp(dir_ / "w8" / "verdicts.jsonl"));
}

TEST_F(Cli, VerifyCodeUnknownProblemAbortsBeforeExecution) {
  const auto marker = dir_ / "ran";
  const std::string body = "{\"problem_id\":\"add\",\"response\":" +
                           code_response("open('" + marker.string() + "','w')\nprint(3)") +
                           "}\n{\"problem_id\":\"nope\",\"response\":\"x\"}\n";
  const auto r = run({"verify-code", "--problems", file("p.jsonl", kProblems), "--responses", file("r.jsonl", body),
                      "--out-dir", out("o")});
  EXPECT_EQ(r.code, rlvr::cli::kInputError);
  EXPECT_NE(r.err.find(":2:"), std::string::npos);
  EXPECT_FALSE(fs::exists(marker));
  EXPECT_FALSE(fs::exists(dir_ / "o" / "verdicts.jsonl"));
}

std::string corpus_record(const std::string& id, const std::string& q, const std::string& oracle) {
  return json{{"id", id}, {"domain", "MATH"}, {"question", q}, {"oracle", oracle}, {"source", "test"}}.dump() + "\n";
}

TEST_F(Cli, CurateDropsPlantedOverlap) {
  const std::string bench =
      "{\"question\":\"Let ABCD be a convex quadrilateral whose diagonals meet at the point P inside it\"}\n";
  const std::string corpus =
      corpus_record("leak", "Find the area when ABCD be a convex quadrilateral whose diagonals meet at P and the sides are 3 and 4.", "12") +
      corpus_record("fine", "A farmer has seventeen sheep and buys five more sheep at the market today. How many sheep now?", "22");
  const auto cfg = file("c.json", "{\"domain\":\"math\"}");
  const auto r = run({"--config", cfg, "curate", "--corpus", file("corpus.jsonl", corpus), "--benchmarks",
                      file("b.jsonl", bench), "--out-dir", out("o")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto dropped = slurp(dir_ / "o" / "dropped.jsonl");
  EXPECT_NE(dropped.find("\"leak\""), std::string::npos);
  EXPECT_NE(dropped.find("\"contamination\""), std::string::npos);
  EXPECT_NE(slurp(dir_ / "o" / "kept.jsonl").find("\"fine\""), std::string::npos);
}

TEST_F(Cli, CurateUnknownKeyFailsBeforeReadingCorpus) {
  const auto cfg = file("c.json", "{\"domain\":\"math\",\"dedupe\":{}}");
  const auto r = run({"--config", cfg, "curate", "--corpus", out("does_not_exist.jsonl"), "--out-dir", out("o")});
  EXPECT_EQ(r.code, rlvr::cli::kConfigError);
  EXPECT_NE(r.err.find("dedupe"), std::string::npos);
}

TEST_F(Cli, CurateStubSolverIsDeterministic) {
  std::string corpus, script;
  for (int i = 0; i < 6; ++i) {
    const std::string id = "p" + std::to_string(i);
    corpus += corpus_record(id, "Compute the value of " + std::to_string(i) + " plus " + std::to_string(i) +
                                    " and report the final integer answer clearly please.",
                            std::to_string(2 * i));
    json resp = json::array();
    for (int a = 0; a < 8; ++a)
      resp.push_back({{"text", "\\boxed{" + std::to_string(a < i + 2 ? 2 * i : -1) + "}"}, {"tokens", 100 * (a + 1)}});
    script += json{{"id", id}, {"responses", resp}}.dump() + "\n";
  }
  file("script.jsonl", script);
  const auto cfg = file("c.json", R"({"domain":"math","contamination":{"enabled":false},"dedup":{"enabled":false},
      "difficulty":{"attempts":8,"solver":{"mode":"stub","script":"script.jsonl"}}})");
  const auto cp = file("corpus.jsonl", corpus);
  ASSERT_EQ(run({"--config", cfg, "curate", "--corpus", cp, "--out-dir", out("a")}).code, 0);
  ASSERT_EQ(run({"--config", cfg, "curate", "--corpus", cp, "--out-dir", out("b")}).code, 0);
  const auto a = slurp(dir_ / "a" / "difficulty.jsonl");
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, slurp(dir_ / "b" / "difficulty.jsonl"));
  EXPECT_EQ(read_json(dir_ / "a" / "manifest.json")["config_hash"], read_json(dir_ / "b" / "manifest.json")["config_hash"]);
  // Prompts solved by fewer than half the attempts are dropped.
  const auto dropped = slurp(dir_ / "a" / "dropped.jsonl");
  EXPECT_NE(dropped.find("\"p0\""), std::string::npos);
  EXPECT_EQ(dropped.find("\"p5\""), std::string::npos);
}

TEST_F(Cli, CurateSolverFailureDiscardsResults) {
  const auto cfg = file("c.json", R"({"domain":"math","contamination":{"enabled":false},
      "difficulty":{"solver":{"mode":"http","endpoint":"http://127.0.0.1:9","max_retries":0,"backoff_ms":1}}})");
  const auto r = run({"--config", cfg, "curate", "--corpus",
                      file("c.jsonl", corpus_record("x", "What is two plus two, written as a single integer value?", "4")),
                      "--out-dir", out("o")});
  EXPECT_EQ(r.code, rlvr::cli::kInfraError) << r.err;
  EXPECT_FALSE(fs::exists(dir_ / "o" / "kept.jsonl"));
  EXPECT_FALSE(fs::exists(dir_ / "o" / "difficulty.jsonl"));
}

const char* kTrain = R"({
  "seed": 2,
  "task": {"prompts": 16, "ops": "+-*", "max_operand": 30, "max_answer_chars": 3},
  "init": {"strength": [1, 3], "noise": 0.5},
  "schedule": [{"name": "s", "max_len": 8, "group_size": 8, "steps": 120}],
  "update": {"learning_rate": 15, "batch_size": 16},
  "eval": {"every": 60, "samples": 8, "temperature": 1.0},
  "checkpoint_every": 60
})";

std::vector<json> log_lines(const fs::path& p) {
  std::vector<json> v;
  std::ifstream in(p);
  for (std::string line; std::getline(in, line);) v.push_back(json::parse(line));
  return v;
}

TEST_F(Cli, TrainIsByteReproducible) {
  const auto cfg = file("t.json", kTrain);
  ASSERT_EQ(run({"--config", cfg, "train", "--out-dir", out("a"), "--workers", "1"}).code, 0);
  ASSERT_EQ(run({"--config", cfg, "train", "--out-dir", out("b"), "--workers", "3"}).code, 0);
  EXPECT_EQ(slurp(dir_ / "a" / "train_log.jsonl"), slurp(dir_ / "b" / "train_log.jsonl"));
  EXPECT_TRUE(fs::exists(dir_ / "a" / "checkpoints" / "step_60.ckpt"));
  EXPECT_TRUE(fs::exists(dir_ / "a" / "checkpoints" / "final.ckpt"));
  const auto ma = read_json(dir_ / "a" / "manifest.json"), mb = read_json(dir_ / "b" / "manifest.json");
  EXPECT_EQ(ma["config_hash"], mb["config_hash"]);
  EXPECT_EQ(ma["artifacts"]["train_log"]["sha256"], mb["artifacts"]["train_log"]["sha256"]);
  ASSERT_EQ(run({"--config", cfg, "--seed", "3", "train", "--out-dir", out("c")}).code, 0);
  EXPECT_NE(slurp(dir_ / "a" / "train_log.jsonl"), slurp(dir_ / "c" / "train_log.jsonl"));
  EXPECT_EQ(read_json(dir_ / "c" / "manifest.json")["master_seed"], 3);
}

TEST_F(Cli, TrainOffPolicyAblationDecaysEntropyFaster) {
  const auto cfg = file("t.json", kTrain);
  ASSERT_EQ(run({"--config", cfg, "train", "--out-dir", out("on")}).code, 0);
  ASSERT_EQ(run({"--config", cfg, "train", "--ablate", "off-policy-4", "--out-dir", out("off")}).code, 0);
  const auto on = log_lines(dir_ / "on" / "train_log.jsonl"), off = log_lines(dir_ / "off" / "train_log.jsonl");
  EXPECT_EQ(off.front()["config"]["update"]["updates_per_generation"], 4);
  const auto& a = on[60];
  const auto& b = off[60];
  ASSERT_EQ(a["type"], "step");
  EXPECT_LT(b["entropy"].get<double>(), a["entropy"].get<double>());
}

TEST_F(Cli, TrainConfigErrors) {
  auto r = run({"--config", file("e.json", "{\"schedule\": []}"), "train", "--out-dir", out("o")});
  EXPECT_EQ(r.code, rlvr::cli::kConfigError);
  EXPECT_NE(r.err.find("empty schedule"), std::string::npos);
  EXPECT_EQ(run({"train", "--out-dir", out("o")}).code, rlvr::cli::kConfigError);
  EXPECT_EQ(run({"--config", file("t.json", kTrain), "train", "--ablate", "off-policy-9", "--out-dir", out("o")}).code,
            rlvr::cli::kConfigError);
}

TEST_F(Cli, TrainNonFiniteLossAbortsWithDiagnostics) {
  const auto cfg = file("n.json", R"({"seed": 1, "task": {"prompts": 4, "max_operand": 9, "max_answer_chars": 2},
      "init": {"strength": [1, 2]}, "schedule": [{"max_len": 4, "temperature": 1e-320, "group_size": 4, "steps": 5}]})");
  const auto r = run({"--config", cfg, "train", "--out-dir", out("o")});
  EXPECT_EQ(r.code, rlvr::cli::kInfraError);
  EXPECT_NE(r.err.find("NONFINITE_LOSS"), std::string::npos);
  const auto d = read_json(dir_ / "o" / "diagnostic.json");
  EXPECT_EQ(d["step"], 0);
  EXPECT_EQ(log_lines(dir_ / "o" / "train_log.jsonl").back()["abort_step"], 0);
}

TEST_F(Cli, TrainOnCorpus) {
  std::string corpus;
  for (int i = 0; i < 6; ++i) corpus += corpus_record("c" + std::to_string(i), "q", std::to_string(i * 7));
  const auto r = run({"--config", file("t.json", kTrain), "train", "--corpus", file("c.jsonl", corpus), "--out-dir", out("o")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(log_lines(dir_ / "o" / "train_log.jsonl").back()["prompts"], 6);
  EXPECT_EQ(run({"--config", file("t.json", kTrain), "train", "--corpus",
                 file("bad.jsonl", corpus_record("z", "q", "\\pi")), "--out-dir", out("p")}).code,
            rlvr::cli::kInputError);
}

TEST_F(Cli, EvalReports) {
  const auto m = file("m.jsonl", "{\"problem_id\":\"p1\",\"outcomes\":[1,0,1,0]}\n{\"problem_id\":\"p2\",\"outcomes\":[0,0,0,0]}\n");
  const auto b = file("b.jsonl", "{\"problem_id\":\"p1\",\"outcomes\":[0,0,0,0]}\n{\"problem_id\":\"p2\",\"outcomes\":[0,0,0,0]}\n");
  const auto r = run({"eval", "--matrix", m, "--k", "1,2,4,8", "--baseline", b, "--seed", "5", "--out-dir", out("o")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto s = read_json(dir_ / "o" / "summary.json");
  ASSERT_EQ(s["k"].size(), 4u);
  EXPECT_NE(s["k"][3]["error"].get<std::string>().find("K_EXCEEDS_N"), std::string::npos);
  EXPECT_FALSE(s["k"][2].contains("error"));
  EXPECT_EQ(s["newly_solved"]["count"], 1);
  const auto rows = log_lines(dir_ / "o" / "solve_rate.jsonl");
  EXPECT_NEAR(rows[1]["pass_at_k_closed"]["2"].get<double>(), 0.8333, 5e-5);
  EXPECT_NE(slurp(dir_ / "o" / "problems.csv").find("0.8333333333"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir_ / "o" / "pass_at_k.svg"));
  EXPECT_TRUE(fs::exists(dir_ / "o" / "solve_rate.svg"));
  const auto man = read_json(dir_ / "o" / "manifest.json");
  EXPECT_EQ(man["extra"]["sampling"]["top_p"], 0.95);
  EXPECT_EQ(man["extra"]["sampling"]["max_length"], 32768);
  ASSERT_EQ(run({"eval", "--matrix", m, "--k", "1,2,4,8", "--baseline", b, "--seed", "5", "--out-dir", out("o2")}).code, 0);
  EXPECT_EQ(slurp(dir_ / "o" / "k_table.jsonl"), slurp(dir_ / "o2" / "k_table.jsonl"));
  EXPECT_EQ(run({"eval", "--matrix", file("bad.jsonl", "{\"problem_id\":\"p\",\"outcomes\":[2]}\n"), "--out-dir", out("x")}).code,
            rlvr::cli::kInputError);
}

#ifdef RLVR_BINARY
// Peak RSS of the CLI verifying `records` identical lines, in KiB.
long peak_rss_kib(const fs::path& dir, std::size_t records) {
  const auto in = dir / ("big_" + std::to_string(records) + ".jsonl");
  {
    std::ofstream f(in);
    for (std::size_t i = 0; i < records; ++i)
      f << "{\"id\":\"r" << i << "\",\"response\":\"The answer is \\\\boxed{" << (i % 97) << "}\",\"oracle\":\"" << (i % 89)
        << "\"}\n";
  }
  const pid_t pid = ::fork();
  if (pid == 0) {
    std::freopen("/dev/null", "w", stdout);
    const std::string o = (dir / ("out_" + std::to_string(records))).string();
    ::execl(RLVR_BINARY, "rlvr", "--workers", "2", "--out-dir", o.c_str(), "verify-math", "--in", in.c_str(),
            static_cast<char*>(nullptr));
    ::_exit(127);
  }
  int status = 0;
  rusage ru{};
  ::wait4(pid, &status, 0, &ru);
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) return -1;
  return ru.ru_maxrss;
}

TEST_F(Cli, VerifyMathStreamsInBoundedMemory) {
  const long small = peak_rss_kib(dir_, 10000);
  const long big = peak_rss_kib(dir_, 1000000);
  ASSERT_GT(small, 0);
  ASSERT_GT(big, 0);
  const auto s = read_json(dir_ / "out_1000000" / "summary.json");
  EXPECT_EQ(s["records"], 1000000);
  // 100x more records, essentially the same footprint.
  EXPECT_LT(big, small + 16 * 1024) << "small " << small << " KiB, big " << big << " KiB";
}
#endif

}  // namespace
