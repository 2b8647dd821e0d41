#include <gtest/gtest.h>

#include "rlvr/common/rng.hpp"
#include "rlvr/curation/pipeline.hpp"
#include "rlvr/curation/ngram_index.hpp"

using namespace rlvr::curation;
using rlvr::json;

namespace {

PromptRecord rec(std::string id, std::string q, std::string oracle = "4", json meta = json::object()) {
  PromptRecord r;
  r.id = std::move(id);
  r.question = std::move(q);
  r.oracle = std::move(oracle);
  r.metadata = std::move(meta);
  return r;
}

std::vector<std::string> ids(const std::vector<PromptRecord>& rs) {
  std::vector<std::string> out;
  for (const auto& r : rs) out.push_back(r.id);
  return out;
}

const std::string kStatement =
    "Given an array of n integers, find the length of the longest strictly increasing "
    "subsequence. The first line contains n and the second line contains the array.";

}  // namespace

TEST(Url, Normalization) {
  EXPECT_EQ(normalize_url("https://www.Codeforces.com/problemset/problem/1/A/"),
            "codeforces.com/problemset/problem/1/A");
  EXPECT_EQ(normalize_url("http://codeforces.com:80/problemset/problem/1/A#top"),
            "codeforces.com/problemset/problem/1/A");
  EXPECT_EQ(normalize_url("https://atcoder.jp/contests/abc100/tasks?lang=en"),
            "atcoder.jp/contests/abc100/tasks?lang=en");
  EXPECT_EQ(normalize_url("numina"), "");
}

TEST(Dedup, SameUrlOneSurvivor) {
  auto r = dedup({rec("b", "first text entirely", "1", {{"url", "https://x.org/p/1"}}),
                  rec("a", "some other words here", "1", {{"url", "http://www.x.org/p/1/"}})});
  EXPECT_EQ(ids(r.kept), std::vector<std::string>{"a"});
  ASSERT_EQ(r.clusters.size(), 1u);
  EXPECT_EQ(r.clusters[0].survivor, "a");
  EXPECT_EQ(r.clusters[0].merged, std::vector<std::string>{"b"});
  EXPECT_TRUE(r.clusters[0].by_url);
  EXPECT_FALSE(r.clusters[0].by_ngram);
}

TEST(Dedup, IdenticalStatementsAcrossPlatformsMerge) {
  auto r = dedup({rec("lc-300", kStatement), rec("cf-9", "Problem: " + kStatement + " Output one integer.")});
  EXPECT_EQ(ids(r.kept), std::vector<std::string>{"cf-9"});
  ASSERT_EQ(r.clusters.size(), 1u);
  EXPECT_TRUE(r.clusters[0].by_ngram);
  EXPECT_GT(ngram_overlap(kStatement, "Problem: " + kStatement, 14), 0.99);
}

TEST(Dedup, DisjointStatementsKept) {
  auto r = dedup({rec("a", kStatement),
                  rec("b", "Count the number of ways to tile a 2 by n board with dominoes modulo a prime.")});
  EXPECT_EQ(ids(r.kept), (std::vector<std::string>{"a", "b"}));
  EXPECT_TRUE(r.clusters.empty());
}

TEST(Dedup, OverlapRatio) {
  EXPECT_DOUBLE_EQ(ngram_overlap("a b c", "A, b; c", 14), 1.0);
  EXPECT_DOUBLE_EQ(ngram_overlap("a b c", "a b d", 14), 0.0);
  EXPECT_DOUBLE_EQ(ngram_overlap("", "", 14), 0.0);
  EXPECT_DOUBLE_EQ(ngram_overlap("a b c d e", "a b c d x", 2), 3.0 / 4.0);
}

TEST(Dedup, TransitiveClustersKeepSmallestId) {
  auto r = dedup({rec("m", "t1", "1", {{"url", "https://a/1"}}),
                  rec("z", "t2", "1", {{"url", "https://a/1"}, }),
                  rec("c", "t2", "1"),
                  rec("q", "unrelated statement about graphs", "1")});
  // z shares a URL with m and its text with c.
  EXPECT_EQ(ids(r.kept), (std::vector<std::string>{"c", "q"}));
  ASSERT_EQ(r.clusters.size(), 1u);
  EXPECT_EQ(r.clusters[0].merged, (std::vector<std::string>{"m", "z"}));
  EXPECT_TRUE(r.clusters[0].by_url && r.clusters[0].by_ngram);
}

TEST(Dedup, Idempotent) {
  rlvr::Rng rng(9);
  static const char* words[] = {"graph", "tree", "sum", "array", "prime", "query", "string", "path"};
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<PromptRecord> rs;
    std::vector<std::string> bases;
    for (int b = 0; b < 4; ++b) {
      std::string t;
      for (int k = 0; k < 20; ++k) t += std::string(words[rng.below(8)]) + " ";
      bases.push_back(t);
    }
    for (int i = 0; i < 15; ++i) {
      std::string t = bases[rng.below(4)];
      for (int k = 0, extra = static_cast<int>(rng.below(30)); k < extra; ++k)
        t += std::string(words[rng.below(8)]) + " ";
      json meta = json::object();
      if (rng.bernoulli(0.3)) meta["url"] = "https://site/" + std::to_string(rng.below(5));
      rs.push_back(rec("r" + std::to_string(rng.below(1000)) + "_" + std::to_string(i), t, "1", meta));
    }
    DedupConfig cfg;
    cfg.n = 3 + rng.below(10);
    const auto once = dedup(rs, cfg);
    const auto twice = dedup(once.kept, cfg);
    EXPECT_EQ(ids(twice.kept), ids(once.kept));
    EXPECT_TRUE(twice.clusters.empty());
  }
}

TEST(CurationConfig, DefaultsAndUnknownKeys) {
  auto c = curation_config_from_json(json{{"domain", "code"}});
  EXPECT_EQ(c.ngram_n, 14u);
  EXPECT_FALSE(c.rules);
  c = curation_config_from_json(json::object());
  EXPECT_EQ(c.ngram_n, 9u);
  EXPECT_TRUE(c.rules);
  EXPECT_THROW(curation_config_from_json(json{{"domian", "math"}}), rlvr::ConfigError);
  EXPECT_THROW(curation_config_from_json(json{{"dedup", {{"treshold", 0.5}}}}), rlvr::ConfigError);
  EXPECT_THROW(curation_config_from_json(json{{"rules", {{"disabled", {"nope"}}}}}), rlvr::ConfigError);
  EXPECT_THROW(curation_config_from_json(json{{"difficulty", {{"pass_rate_max", "7/6"}}}}), rlvr::ConfigError);
  EXPECT_THROW(curation_config_from_json(json{{"length", {{"rate", 0.5}}}}), rlvr::ConfigError);
  c = curation_config_from_json(json{{"difficulty", {{"pass_rate_max", "6/16"}}}});
  ASSERT_TRUE(c.pass_rate_max);
  EXPECT_EQ(c.pass_rate_max->num, 3);
  EXPECT_EQ(c.pass_rate_max->den, 8);
  EXPECT_EQ(curation_config_from_json(curation_config_to_json(c)).pass_rate_max->den, 8);
}

TEST(Pipeline, PlantedContaminationDroppedWithRuleName) {
  const std::vector<std::string> bench = {
      "Find the number of ordered pairs of positive integers whose least common multiple is 360."};
  std::vector<PromptRecord> corpus = {
      rec("clean", "Let n be the smallest positive integer such that n squared plus one is divisible by 17. Find n."),
      rec("leak", "Compute this: find the number of ordered pairs of positive integers whose sum is 12 please."),
      rec("proof", "Prove that every positive integer greater than one has a prime factor of some size.")};
  const auto res = run_curation(corpus, bench, CurationConfig{});
  EXPECT_EQ(ids(res.kept), std::vector<std::string>{"clean"});
  ASSERT_EQ(res.dropped.size(), 2u);
  EXPECT_EQ(res.dropped[0].id, "leak");
  EXPECT_EQ(res.dropped[0].rule, "contamination");
  EXPECT_EQ(res.dropped[1].rule, "proof");
}

TEST(Pipeline, FilterOrderInvariance) {
  rlvr::Rng rng(21);
  static const char* pool[] = {
      "Prove that the sum of two odd numbers is even for every pair of integers.",
      "Find the remainder when 2 to the power 100 is divided by 7 in modular arithmetic.",
      "Which of the following is the largest prime below fifty? (A) 43 (B) 47 (C) 49",
      "Compute the number of subsets of a ten element set that contain exactly three elements.",
      "Find x.",
      "In the figure, the square has side length four; compute the area of the shaded region.",
      "Determine the largest integer n such that n factorial divides one hundred factorial evenly."};
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::string> bench;
    for (int i = 0; i < 3; ++i) bench.push_back(pool[rng.below(7)]);
    std::vector<PromptRecord> corpus;
    for (int i = 0; i < 12; ++i) corpus.push_back(rec("p" + std::to_string(i), pool[rng.below(7)]));
    NGramIndex idx(bench, 9);
    std::set<std::string> a, b;
    for (const auto& r : corpus) {
      if (!idx.is_contaminated(r.question) && !apply_rule_filters(r)) a.insert(r.id);
      if (!apply_rule_filters(r) && !idx.is_contaminated(r.question)) b.insert(r.id);
    }
    EXPECT_EQ(a, b);
    CurationConfig cfg;
    cfg.dedup = false;
    const auto res = run_curation(corpus, bench, cfg);
    auto kept = ids(res.kept);
    EXPECT_EQ(std::set<std::string>(kept.begin(), kept.end()), a);
  }
}

TEST(Pipeline, DifficultyStagesAndDeterminism) {
  ScriptedSolver solver;
  std::vector<PromptRecord> corpus;
  for (int i = 0; i < 40; ++i) {
    const std::string id = "q" + std::to_string(i);
    corpus.push_back(rec(id, "Let n be the number " + std::to_string(1000 + i) +
                                 " written in base ten; find the sum of all its decimal digits.",
                         "7"));
    std::vector<SolverResponse> rs;
    const int correct = i % 9;
    for (int k = 0; k < 8; ++k)
      rs.push_back({k < correct ? "\\boxed{7}" : "\\boxed{1}", static_cast<std::size_t>(1000 + 100 * i)});
    solver.add(id, rs);
  }
  CurationConfig cfg = curation_config_from_json(json{
      {"seed", 5},
      {"dedup", {{"enabled", false}}},
      {"difficulty", {{"attempts", 8}, {"pass_rate_max", "6/8"}}},
      {"length", {{"rate", 0.5}}}});
  const auto res = run_curation(corpus, {}, cfg, &solver);
  std::map<std::string, int> by_rule;
  for (const auto& d : res.dropped) ++by_rule[d.rule];
  EXPECT_GT(by_rule["not_majority_solvable"], 0);
  EXPECT_GT(by_rule["pass_rate_above_threshold"], 0);
  EXPECT_GT(by_rule["too_short_response"], 0);
  EXPECT_EQ(res.kept.size() + res.dropped.size(), corpus.size());
  const auto again = run_curation(corpus, {}, cfg, &solver);
  EXPECT_EQ(ids(again.kept), ids(res.kept));
  ScriptedSolver broken;
  EXPECT_THROW(run_curation(corpus, {}, cfg, &broken), SolverUnavailable);
}
