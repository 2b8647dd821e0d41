#include <gtest/gtest.h>

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "rlvr/common/rng.hpp"
#include "rlvr/eval/metrics.hpp"
#include "rlvr/eval/report.hpp"

namespace {

using namespace rlvr;
using namespace rlvr::eval;
using boost::multiprecision::cpp_rational;

// Fraction of the C(n, k) subsets of a row with c leading successes that hold one.
cpp_rational enumerate_pass_at_k(std::size_t n, std::size_t c, std::size_t k) {
  long long hit = 0, total = 0;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) != k) continue;
    ++total;
    hit += (mask & ((1u << c) - 1)) != 0;
  }
  return cpp_rational(hit, total);
}

std::filesystem::path write_tmp(const std::string& name, const std::string& body) {
  const auto p = std::filesystem::temp_directory_path() / name;
  std::ofstream(p) << body;
  return p;
}

ResponseMatrix matrix(std::vector<std::pair<std::string, Outcomes>> rows) {
  ResponseMatrix m;
  for (auto& [id, o] : rows) {
    m.problem_ids.push_back(id);
    m.outcomes.push_back(o);
  }
  return m;
}

TEST(AvgAtK, Examples) {
  EXPECT_DOUBLE_EQ(avg_at_k(Outcomes{1, 0, 1, 0}, 4), 0.5);
  EXPECT_DOUBLE_EQ(avg_at_k(Outcomes{1, 1, 1}, 2), 1.0);
  EXPECT_DOUBLE_EQ(avg_at_k(Outcomes{0, 0, 0}, 3), 0.0);
  EXPECT_DOUBLE_EQ(avg_at_k(Outcomes{1, 0, 0, 0}, 1), 1.0);  // first k, not a resample
  try {
    avg_at_k(Outcomes{1, 0}, 3);
    FAIL();
  } catch (const EvalError& e) {
    EXPECT_EQ(e.code(), EvalErrorCode::KExceedsN);
  }
  EXPECT_THROW(avg_at_k(Outcomes{1}, 0), EvalError);
}

TEST(PassAtK, Examples) {
  EXPECT_NEAR(pass_at_k_closed(4, 2, 2), 5.0 / 6.0, 1e-15);
  EXPECT_EQ(pass_at_k_exact(4, 2, 2), cpp_rational(5, 6));
  for (std::size_t k = 1; k <= 10; ++k) EXPECT_EQ(pass_at_k_closed(10, 0, k), 0.0);
  EXPECT_EQ(pass_at_k_closed(10, 1, 10), 1.0);
  EXPECT_EQ(pass_at_k_closed(10, 0, 10), 0.0);
  EXPECT_THROW(pass_at_k_closed(4, 5, 1), EvalError);
  EXPECT_THROW(pass_at_k_closed(4, 2, 5), EvalError);
}

TEST(PassAtK, ClosedFormMatchesSubsetEnumeration) {
  for (std::size_t n = 1; n <= 12; ++n)
    for (std::size_t c = 0; c <= n; ++c)
      for (std::size_t k = 1; k <= n; ++k) {
        const auto want = enumerate_pass_at_k(n, c, k);
        EXPECT_EQ(pass_at_k_exact(n, c, k), want);
        EXPECT_NEAR(pass_at_k_closed(n, c, k), static_cast<double>(want), 1e-15);
      }
}

TEST(PassAtK, ProductFormStableUpTo1024) {
  Rng rng(3);
  for (int i = 0; i < 300; ++i) {
    const std::size_t n = 1 + rng.below(1024), c = rng.below(n + 1), k = 1 + rng.below(n);
    EXPECT_NEAR(pass_at_k_closed(n, c, k), static_cast<double>(pass_at_k_exact(n, c, k)), 1e-12);
  }
}

TEST(PassAtK, MonotoneInKAndC) {
  for (std::size_t n : {5u, 16u, 64u, 300u})
    for (std::size_t c = 0; c <= n; c += 1 + n / 20)
      for (std::size_t k = 1; k < n; k += 1 + n / 20) {
        EXPECT_LE(pass_at_k_closed(n, c, k), pass_at_k_closed(n, c, k + 1) + 1e-15);
        if (c < n) EXPECT_LE(pass_at_k_closed(n, c, k), pass_at_k_closed(n, c + 1, k) + 1e-15);
      }
  for (std::size_t n = 1; n <= 40; ++n)
    for (std::size_t c = 0; c <= n; ++c) EXPECT_NEAR(pass_at_k_closed(n, c, 1), double(c) / double(n), 1e-15);
}

TEST(PassAtK, ResampledBasics) {
  const Outcomes all(20, 1);
  const auto r = pass_at_k_resampled(all, 7, 50, 1);
  EXPECT_EQ(r.estimate, 1.0);
  EXPECT_EQ(r.method, PassKMethod::Resampled);
  EXPECT_EQ(r.runs, 50u);
  const Outcomes row{1, 0, 0, 1, 0, 0, 0, 0};
  EXPECT_EQ(pass_at_k_resampled(row, 2, 1, 9).estimate, pass_at_k_resampled(row, 2, 1, 9).estimate);
  EXPECT_THROW(pass_at_k_resampled(row, 9, 10, 1), EvalError);
  EXPECT_THROW(pass_at_k_resampled(row, 2, 0, 1), EvalError);
  EXPECT_EQ(pass_at_k_resampled(Outcomes(8, 0), 4, 30, 1).estimate, 0.0);
}

TEST(PassAtK, ResampledConvergesToClosedForm) {
  Rng rng(5);
  for (int i = 0; i < 40; ++i) {
    const std::size_t n = 2 + rng.below(200), c = rng.below(n + 1), k = 1 + rng.below(n);
    Outcomes row(n, 0);
    for (std::size_t j = 0; j < c; ++j) row[j] = 1;
    const auto r = pass_at_k_resampled(row, k, 20000, derive_seed(5, i));
    EXPECT_NEAR(r.estimate, pass_at_k_closed(n, c, k), std::max(4 * r.sem, 1e-12));
  }
}

TEST(PassAtK, BenchmarkLevel) {
  const auto m = matrix({{"a", {1, 0, 1, 0}}, {"b", {0, 0, 0, 0}}, {"c", {1, 1, 1, 1}}});
  EXPECT_NEAR(pass_at_k_closed(m, 2).estimate, (5.0 / 6 + 0 + 1) / 3, 1e-15);
  EXPECT_NEAR(avg_at_k(m, 4), 0.5, 1e-15);
  const auto r = pass_at_k_resampled(m, 2, 4000, 11);
  EXPECT_NEAR(r.estimate, pass_at_k_closed(m, 2).estimate, 4 * r.sem);
  EXPECT_EQ(pass_at_k_resampled(m, 2, 100, 11).estimate, pass_at_k_resampled(m, 2, 100, 11).estimate);
}

TEST(Sem, DeterministicRowsGiveZero) {
  const std::vector<Outcomes> rows = {Outcomes(64, 1), Outcomes(64, 0), Outcomes(64, 1)};
  for (const auto& s : sem_of_avg(rows, {16, 32, 64})) {
    EXPECT_GT(s.sem, -1);
    EXPECT_FALSE(s.degenerate);
  }
  const std::vector<Outcomes> same = {Outcomes(64, 1), Outcomes(64, 1)};
  for (const auto& s : sem_of_avg(same, {16, 64})) EXPECT_EQ(s.sem, 0.0);
}

TEST(Sem, SingleProblemIsDegenerate) {
  const auto s = sem_of_avg({Outcomes{1}}, {1});
  EXPECT_EQ(s[0].sem, 0.0);
  EXPECT_TRUE(s[0].degenerate);
  EXPECT_THROW(sem_of_avg({Outcomes{1, 0}}, {3}), EvalError);
}

TEST(Sem, MatchesHandComputation) {
  // Per-problem means 1, 0.5, 0: sample variance 0.25, sem sqrt(0.25 / 3).
  const std::vector<Outcomes> rows = {{1, 1}, {1, 0}, {0, 0}};
  EXPECT_NEAR(sem_of_avg(rows, {2})[0].sem, std::sqrt(0.25 / 3), 1e-15);
}

TEST(Sem, ShrinksByRootTwoWhenKDoubles) {
  // Mean over many synthetic Bernoulli(0.5) matrices.
  double r1 = 0, r2 = 0;
  const int trials = 1000;
  for (int t = 0; t < trials; ++t) {
    Rng rng(derive_seed(21, static_cast<std::uint64_t>(t)));
    std::vector<Outcomes> rows(40, Outcomes(64));
    for (auto& r : rows)
      for (auto& v : r) v = rng.bernoulli(0.5);
    const auto s = sem_of_avg(rows, {16, 32, 64});
    r1 += s[1].sem / s[0].sem;
    r2 += s[2].sem / s[1].sem;
  }
  EXPECT_NEAR(r1 / trials, 1 / std::sqrt(2.0), 0.03);
  EXPECT_NEAR(r2 / trials, 1 / std::sqrt(2.0), 0.03);
}

TEST(SolveRate, ReportOrderingAndTopics) {
  const auto m = matrix({{"p1", {1, 1, 1, 1}}, {"p2", {0, 0, 0, 0}}, {"p3", {1, 0, 0, 0}}, {"p0", {1, 0, 0, 0}}});
  const TopicMap topics = {{"p1", {"graphs", "dp"}}, {"p2", {"dp"}}, {"p3", {"math"}}};
  const auto r = solve_rate_report(m, topics);
  ASSERT_EQ(r.problems.size(), 4u);
  EXPECT_EQ(r.problems[0].problem_id, "p2");
  EXPECT_EQ(r.problems[1].problem_id, "p0");
  EXPECT_EQ(r.problems[2].problem_id, "p3");
  EXPECT_EQ(r.problems[3].problem_id, "p1");
  ASSERT_EQ(r.topics.size(), 3u);
  EXPECT_EQ(r.topics[0].topic, "dp");
  EXPECT_DOUBLE_EQ(r.topics[0].accuracy, 0.5);
  EXPECT_EQ(r.topics[0].problems, 2u);
  EXPECT_DOUBLE_EQ(r.topics[2].accuracy, 0.25);
  EXPECT_TRUE(solve_rate_report(m).topics.empty());
  EXPECT_EQ(solve_rate_report(m).problems.size(), 4u);
  try {
    solve_rate_report(m, {{"zz", {"x"}}});
    FAIL();
  } catch (const EvalError& e) {
    EXPECT_EQ(e.code(), EvalErrorCode::UnknownProblemId);
  }
}

TEST(SolveRate, NewlySolved) {
  std::vector<std::pair<std::string, Outcomes>> a_rows, b_rows;
  for (int i = 0; i < 30; ++i) {
    Outcomes a(64, 0), b(64, 0);
    if (i % 2 == 0) a[5] = b[7] = 1;  // solved by both
    if (i == 3 || i == 9 || i == 17) b[60] = 1;  // only B
    a_rows.push_back({"aime" + std::to_string(i), a});
    b_rows.push_back({"aime" + std::to_string(i), b});
  }
  const auto a = matrix(a_rows), b = matrix(b_rows);
  const auto ns = newly_solved(a, b);
  EXPECT_EQ(ns.count, 3u);
  EXPECT_EQ(ns.problem_ids, (std::vector<std::string>{"aime17", "aime3", "aime9"}));
  EXPECT_EQ(newly_solved(a, a).count, 0u);
  EXPECT_EQ(newly_solved(b, a).count, 0u);
}

TEST(MatrixIo, LoadAndValidate) {
  const auto ok = write_tmp("rlvr_m_ok.jsonl",
                            "{\"problem_id\":\"a\",\"outcomes\":[1,0,true],\"params\":{\"temperature\":0.6}}\n\n"
                            "{\"problem_id\":\"b\",\"outcomes\":[0,0,0]}\n");
  const auto m = load_matrix(ok);
  EXPECT_EQ(m.size(), 2u);
  EXPECT_EQ(m.n(), 3u);
  EXPECT_EQ(m.outcomes[0], (Outcomes{1, 0, 1}));
  EXPECT_EQ(m.params["temperature"], 0.6);
  const char* bad[] = {"{\"problem_id\":\"a\",\"outcomes\":[1,2]}\n",
                       "{\"problem_id\":\"a\",\"outcomes\":[1]}\n{\"problem_id\":\"a\",\"outcomes\":[1]}\n",
                       "{\"problem_id\":\"a\",\"outcomes\":[1]}\n{\"problem_id\":\"b\",\"outcomes\":[1,0]}\n",
                       "{\"outcomes\":[1]}\n", "{\"problem_id\":\"a\",\"outcomes\":[]}\n", "not json\n"};
  for (const char* b : bad) {
    const auto p = write_tmp("rlvr_m_bad.jsonl", b);
    EXPECT_THROW(load_matrix(p), InputError) << b;
  }
  const auto ragged =
      write_tmp("rlvr_m_rag.jsonl", "{\"problem_id\":\"a\",\"outcomes\":[1]}\n{\"problem_id\":\"b\",\"outcomes\":[1,0]}\n");
  EXPECT_FALSE(load_matrix(ragged, true).n().has_value());
  try {
    load_matrix(write_tmp("rlvr_m_bad2.jsonl", "{\"problem_id\":\"a\",\"outcomes\":[1]}\n{\"problem_id\":\"b\"}\n"));
    FAIL();
  } catch (const InputError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(Report, KTableMarksOnlyBadK) {
  const auto m = matrix({{"a", {1, 0, 1, 0}}, {"b", {0, 1, 0, 0}}});
  const auto rows = k_table(m, {1, 2, 4, 8}, 100, 1);
  ASSERT_EQ(rows.size(), 4u);
  for (int i = 0; i < 3; ++i) EXPECT_FALSE(rows[i].error.has_value());
  ASSERT_TRUE(rows[3].error.has_value());
  EXPECT_NE(rows[3].error->find("K_EXCEEDS_N"), std::string::npos);
  EXPECT_NEAR(rows[1].pass_closed, (5.0 / 6 + 0.5) / 2, 1e-15);
  EXPECT_TRUE(k_row_to_json(rows[3]).contains("error"));

  const auto dir = std::filesystem::temp_directory_path() / "rlvr_report_test";
  std::filesystem::create_directories(dir);
  write_k_table_csv(dir / "k.csv", rows);
  const auto sr = solve_rate_report(m);
  write_problems_csv(dir / "p.csv", sr);
  write_solve_rate_svg(dir / "s.svg", sr, "solve rate");
  write_pass_at_k_svg(dir / "k.svg", rows, "pass@k");
  std::ifstream k(dir / "k.csv");
  std::string header, line;
  std::getline(k, header);
  std::getline(k, line);
  EXPECT_EQ(line.substr(0, 4), "1,0.");
  std::ifstream svg(dir / "k.svg");
  std::string text((std::istreambuf_iterator<char>(svg)), {});
  EXPECT_NE(text.find("<polyline"), std::string::npos);
  EXPECT_NE(text.find("</svg>"), std::string::npos);
  std::filesystem::remove_all(dir);
}

}  // namespace
