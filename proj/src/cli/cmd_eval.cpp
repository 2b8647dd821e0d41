#include <algorithm>
#include <ostream>

#include "commands.hpp"
#include "rlvr/eval/report.hpp"

namespace rlvr::cli {

void cmd_eval(const GlobalOptions& g, const EvalOptions& o, RunManifest& m, std::ostream& out) {
  using namespace eval;
  const std::uint64_t seed = g.seed.value_or(0);
  m.master_seed = seed;
  m.config = {{"k", o.k}, {"runs", o.runs}, {"ragged", o.ragged}, {"plots", o.plots}};
  m.extra["sampling"] = {{"temperature", o.temperature}, {"top_p", o.top_p}, {"max_length", o.max_length}};
  if (o.runs == 0) throw ConfigError("--runs must be >= 1");
  for (std::size_t k : o.k)
    if (k == 0) throw ConfigError("--k values must be >= 1");

  m.inputs["matrix"] = o.matrix;
  const auto matrix = load_matrix(o.matrix, o.ragged);
  if (matrix.size() == 0) throw InputError(o.matrix.string(), 0, "matrix has no rows");
  std::vector<std::size_t> ks = o.k;
  if (ks.empty()) {
    std::size_t n = 0;
    for (const auto& r : matrix.outcomes) n = std::max(n, r.size());
    for (std::size_t k = 1; k <= n; k *= 2) ks.push_back(k);
    if (ks.back() != n) ks.push_back(n);
  }
  TopicMap topics;
  if (o.topics) {
    m.inputs["topics"] = *o.topics;
    topics = load_topics(*o.topics);
  }
  std::optional<ResponseMatrix> baseline;
  if (o.baseline) {
    m.inputs["baseline"] = *o.baseline;
    baseline = load_matrix(*o.baseline, true);
  }

  const auto rows = k_table(matrix, ks, o.runs, seed);
  auto report = solve_rate_report(matrix, topics);
  add_pass_at_k(report, ks);
  if (baseline) report.newly_solved = newly_solved(*baseline, matrix);

  auto artifact = [&](const std::string& name, const std::string& file) {
    const auto p = g.out_dir / file;
    m.artifacts[name] = p;
    return p;
  };
  write_k_table_csv(artifact("k_table_csv", "k_table.csv"), rows);
  {
    JsonlWriter w(artifact("k_table_jsonl", "k_table.jsonl"));
    for (const auto& r : rows) w.write(k_row_to_json(r));
  }
  write_problems_csv(artifact("problems_csv", "problems.csv"), report);
  write_topics_csv(artifact("topics_csv", "topics.csv"), report);
  {
    JsonlWriter w(artifact("solve_rate_jsonl", "solve_rate.jsonl"));
    for (const auto& p : report.problems) w.write(problem_to_json(p));
  }
  const json sr = solve_rate_to_json(report);
  {
    JsonlWriter w(artifact("topics_jsonl", "topics.jsonl"));
    for (const auto& t : sr["topics"]) w.write(t);
  }
  if (o.plots) {
    write_solve_rate_svg(artifact("solve_rate_svg", "solve_rate.svg"), report, "Per-problem accuracy");
    write_pass_at_k_svg(artifact("pass_at_k_svg", "pass_at_k.svg"), rows, "pass@k");
  }

  json k_json = json::array();
  for (const auto& r : rows) k_json.push_back(k_row_to_json(r));
  json summary{{"problems", matrix.size()}, {"params", matrix.params}, {"k", k_json}};
  if (!topics.empty()) summary["topics"] = sr["topics"];
  if (report.newly_solved) summary["newly_solved"] = sr["newly_solved"];
  const auto summary_path = artifact("summary", "summary.json");
  std::ofstream(summary_path) << summary.dump(2) << '\n';
  out << summary.dump(2) << '\n';
}

}  // namespace rlvr::cli
