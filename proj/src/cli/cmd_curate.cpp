#include <map>
#include <memory>
#include <ostream>

#include "commands.hpp"
#include "rlvr/code/judge.hpp"
#include "rlvr/code/problem.hpp"
#include "rlvr/curation/pipeline.hpp"

namespace rlvr::cli {

void cmd_curate(const GlobalOptions& g, const CurateOptions& o, RunManifest& m, std::ostream& out) {
  using namespace curation;
  // The config is validated before any input is read.
  CurationConfig cfg = curation_config_from_json(load_config_file(g));
  if (g.seed) cfg.seed = *g.seed;
  if (cfg.difficulty && cfg.solver_mode == "stub" && g.config && !cfg.solver_script.empty()) {
    const std::filesystem::path script = cfg.solver_script;
    if (script.is_relative() && !std::filesystem::exists(script))
      cfg.solver_script = (g.config->parent_path() / script).string();
  }
  m.config = curation_config_to_json(cfg);
  m.master_seed = cfg.seed;
  if (cfg.contamination && !o.benchmarks) throw ConfigError("contamination filtering needs --benchmarks");
  if (cfg.difficulty && cfg.domain == Domain::Code && !o.problems)
    throw ConfigError("code difficulty scoring needs --problems");
  if (cfg.difficulty && cfg.solver_mode == "stub" && cfg.solver_script.empty())
    throw ConfigError("curate.difficulty.solver.script is required in stub mode");

  m.inputs["corpus"] = o.corpus;
  const auto corpus = load_records(o.corpus);
  std::vector<std::string> bench;
  if (o.benchmarks) {
    m.inputs["benchmarks"] = *o.benchmarks;
    bench = load_benchmark_texts(*o.benchmarks);
  }

  std::unique_ptr<SolverOracle> solver;
  RecordVerifier verify = verify_math_record;
  std::vector<code::CodeProblem> problems;
  std::map<std::string, const code::CodeProblem*> by_id;
  if (cfg.difficulty) {
    if (cfg.solver_mode == "stub") {
      m.inputs["solver_script"] = cfg.solver_script;
      solver = std::make_unique<ScriptedSolver>(cfg.solver_script);
    } else {
      solver = std::make_unique<HttpSolver>(cfg.http);
    }
    if (cfg.domain == Domain::Code) {
      m.inputs["problems"] = *o.problems;
      problems = code::load_problems(*o.problems);
      for (const auto& p : problems) by_id[p.id] = &p;
      for (const auto& r : corpus)
        if (!by_id.count(r.oracle))
          throw InputError(o.corpus.string(), 0, "record " + r.id + " names unknown problem " + r.oracle);
      verify = [&by_id](const PromptRecord& r, std::string_view response) {
        return code::verify_code(response, *by_id.at(r.oracle)).reward;
      };
    }
  }

  const auto res = run_curation(corpus, bench, cfg, solver.get(), verify);

  auto write = [&](const std::string& name, auto&& fill) {
    const auto path = g.out_dir / (name + ".jsonl");
    JsonlWriter w(path);
    fill(w);
    w.flush();
    m.artifacts[name] = path;
  };
  write("kept", [&](JsonlWriter& w) {
    for (const auto& r : res.kept) w.write(record_to_json(r));
  });
  write("dropped", [&](JsonlWriter& w) {
    for (const auto& d : res.dropped) w.write(drop_to_json(d));
  });
  write("clusters", [&](JsonlWriter& w) {
    for (const auto& c : res.clusters) w.write(cluster_to_json(c));
  });
  if (cfg.difficulty)
    write("difficulty", [&](JsonlWriter& w) {
      for (const auto& r : res.reports) w.write(report_to_json(r));
    });

  std::map<std::string, std::size_t> by_stage, by_rule;
  for (const auto& d : res.dropped) {
    ++by_stage[d.stage];
    ++by_rule[d.rule];
  }
  json summary{{"input", corpus.size()}, {"kept", res.kept.size()}, {"dropped", res.dropped.size()},
               {"dropped_by_stage", by_stage}, {"dropped_by_rule", by_rule}, {"dedup_clusters", res.clusters.size()}};
  const auto summary_path = g.out_dir / "summary.json";
  std::ofstream(summary_path) << summary.dump(2) << '\n';
  m.artifacts["summary"] = summary_path;
  m.extra["summary"] = summary;
  out << summary.dump(2) << '\n';
}

}  // namespace rlvr::cli
