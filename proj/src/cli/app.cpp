#include "rlvr/cli/app.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <sstream>

#include "commands.hpp"
#include "rlvr/code/sandbox.hpp"
#include "rlvr/common/parallel.hpp"
#include "rlvr/curation/difficulty.hpp"
#include "rlvr/eval/metrics.hpp"

namespace rlvr::cli {

namespace {

// Fills `dst` from config key `key` unless the flag was given on the command line.
template <typename T>
void from_config(const json& cfg, const char* key, CLI::Option* flag, T& dst, const std::string& ctx) {
  if (flag->count() > 0 || !cfg.contains(key) || cfg.at(key).is_null()) return;
  dst = config_value<T>(cfg, key, dst, ctx);
}

template <typename T>
void from_config(const json& cfg, const char* key, CLI::Option* flag, std::optional<T>& dst, const std::string& ctx) {
  if (flag->count() > 0 || !cfg.contains(key) || cfg.at(key).is_null()) return;
  dst = config_value<T>(cfg, key, T{}, ctx);
}

std::optional<std::filesystem::path> opt_path(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return std::filesystem::path(s);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Verifiable-reward RL toolkit: answer and code verifiers, data curation, GRPO training on a toy "
               "policy, and evaluation estimators.",
               "rlvr"};
  app.set_version_flag("--version", std::string(RLVR_VERSION));
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  g.workers = default_workers();
  std::string config_path, out_dir = ".";
  std::uint64_t seed = 0;
  app.add_option("--config", config_path, "JSON config file")->envname("RLVR_CONFIG");
  auto* seed_opt = app.add_option("--seed", seed, "Master seed")->envname("RLVR_SEED");
  app.add_option("--workers", g.workers, "Parallel workers (default: logical CPUs)")
      ->envname("RLVR_WORKERS")
      ->check(CLI::PositiveNumber);
  app.add_option("--out-dir", out_dir, "Directory for outputs and the run manifest")->envname("RLVR_OUT_DIR");

  VerifyMathOptions vm;
  std::string vm_in;
  auto* c_vm = app.add_subcommand("verify-math", "Score boxed answers against oracles");
  auto* vm_in_o = c_vm->add_option("--in", vm_in, "JSONL with id, response and oracle fields");
  auto* vm_id = c_vm->add_option("--id-field", vm.id_field);
  auto* vm_resp = c_vm->add_option("--response-field", vm.response_field);
  auto* vm_oracle = c_vm->add_option("--oracle-field", vm.oracle_field);
  auto* vm_tol = c_vm->add_option("--tol", vm.tol, "Relative tolerance for numeric equality");
  auto* vm_strict = c_vm->add_flag("--strict-terminator", vm.strict_terminator,
                                   "Require the reasoning terminator before the answer");

  VerifyCodeOptions vc;
  std::string vc_problems, vc_responses;
  auto* c_vc = app.add_subcommand("verify-code", "Judge fenced programs against problem test cases");
  auto* vc_p = c_vc->add_option("--problems", vc_problems, "Problem JSONL");
  auto* vc_r = c_vc->add_option("--responses", vc_responses, "JSONL with id, problem_id and response");
  auto* vc_runner = c_vc->add_option("--runner", vc.runner, "Command template with {file}");
  auto* vc_tl = c_vc->add_option("--time-limit-ms", vc.time_limit_ms, "Override every case's time limit");
  auto* vc_retries = c_vc->add_option("--max-retries", vc.max_retries, "Retries for sandbox failures");
  auto* vc_strict = c_vc->add_flag("--strict-terminator", vc.strict_terminator);

  CurateOptions cu;
  std::string cu_corpus, cu_bench, cu_problems;
  auto* c_cu = app.add_subcommand("curate", "Decontaminate, filter, deduplicate and score a corpus");
  c_cu->add_option("--corpus", cu_corpus, "Prompt record JSONL")->required();
  c_cu->add_option("--benchmarks", cu_bench, "Benchmark texts (JSONL or one per line)");
  c_cu->add_option("--problems", cu_problems, "Code problem JSONL (code difficulty scoring)");

  TrainOptions tr;
  std::string tr_corpus;
  auto* c_tr = app.add_subcommand("train", "Run a GRPO curriculum on the toy policy");
  c_tr->add_option("--corpus", tr_corpus, "Prompt records to train on instead of the generated task");
  c_tr->add_option("--ablate", tr.ablate,
                   "off-policy-2 | off-policy-4 | direct-max-length | noise-fp[:rate] | noise-fn[:rate]");

  EvalOptions ev;
  std::string ev_matrix, ev_topics, ev_baseline;
  auto* c_ev = app.add_subcommand("eval", "avg@k, pass@k, sem and solve-rate reports");
  auto* ev_m = c_ev->add_option("--matrix", ev_matrix, "Outcome matrix JSONL");
  auto* ev_k = c_ev->add_option("--k", ev.k, "k values (default: powers of two up to n)")->delimiter(',');
  auto* ev_runs = c_ev->add_option("--runs", ev.runs, "Resampling runs");
  auto* ev_t = c_ev->add_option("--topics", ev_topics, "Topic map JSONL");
  auto* ev_b = c_ev->add_option("--baseline", ev_baseline, "Earlier matrix for the newly-solved count");
  auto* ev_rag = c_ev->add_flag("--ragged", ev.ragged, "Allow rows of different lengths");
  bool no_plots = false;
  c_ev->add_flag("--no-plots", no_plots);

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, er;
    const int code = app.exit(e, o, er);
    out << o.str();
    err << er.str();
    return code == 0 ? kOk : kConfigError;
  }

  g.config = opt_path(config_path);
  if (seed_opt->count() > 0) g.seed = seed;
  g.out_dir = out_dir;

  RunManifest m;
  m.started_at = utc_timestamp();
  m.master_seed = g.seed.value_or(0);
  int code = kOk;
  try {
    std::filesystem::create_directories(g.out_dir);
    if (c_vm->parsed()) {
      m.command = "verify-math";
      const json cfg = load_config_file(g);
      check_keys(cfg, {"in", "id_field", "response_field", "oracle_field", "tol", "strict_terminator"}, "verify-math");
      from_config(cfg, "in", vm_in_o, vm_in, "verify-math");
      from_config(cfg, "id_field", vm_id, vm.id_field, "verify-math");
      from_config(cfg, "response_field", vm_resp, vm.response_field, "verify-math");
      from_config(cfg, "oracle_field", vm_oracle, vm.oracle_field, "verify-math");
      from_config(cfg, "tol", vm_tol, vm.tol, "verify-math");
      from_config(cfg, "strict_terminator", vm_strict, vm.strict_terminator, "verify-math");
      if (vm_in.empty()) throw ConfigError("verify-math needs --in");
      vm.in = vm_in;
      cmd_verify_math(g, vm, m, out);
    } else if (c_vc->parsed()) {
      m.command = "verify-code";
      const json cfg = load_config_file(g);
      check_keys(cfg, {"problems", "responses", "runner", "time_limit_ms", "max_retries", "strict_terminator"},
                 "verify-code");
      from_config(cfg, "problems", vc_p, vc_problems, "verify-code");
      from_config(cfg, "responses", vc_r, vc_responses, "verify-code");
      from_config(cfg, "runner", vc_runner, vc.runner, "verify-code");
      from_config(cfg, "time_limit_ms", vc_tl, vc.time_limit_ms, "verify-code");
      from_config(cfg, "max_retries", vc_retries, vc.max_retries, "verify-code");
      from_config(cfg, "strict_terminator", vc_strict, vc.strict_terminator, "verify-code");
      if (vc_problems.empty() || vc_responses.empty()) throw ConfigError("verify-code needs --problems and --responses");
      vc.problems = vc_problems;
      vc.responses = vc_responses;
      cmd_verify_code(g, vc, m, out);
    } else if (c_cu->parsed()) {
      m.command = "curate";
      cu.corpus = cu_corpus;
      cu.benchmarks = opt_path(cu_bench);
      cu.problems = opt_path(cu_problems);
      cmd_curate(g, cu, m, out);
    } else if (c_tr->parsed()) {
      m.command = "train";
      tr.corpus = opt_path(tr_corpus);
      cmd_train(g, tr, m, out);
    } else if (c_ev->parsed()) {
      m.command = "eval";
      const json cfg = load_config_file(g);
      check_keys(cfg, {"matrix", "k", "runs", "topics", "baseline", "ragged", "temperature", "top_p", "max_length"},
                 "eval");
      from_config(cfg, "matrix", ev_m, ev_matrix, "eval");
      from_config(cfg, "k", ev_k, ev.k, "eval");
      from_config(cfg, "runs", ev_runs, ev.runs, "eval");
      from_config(cfg, "topics", ev_t, ev_topics, "eval");
      from_config(cfg, "baseline", ev_b, ev_baseline, "eval");
      from_config(cfg, "ragged", ev_rag, ev.ragged, "eval");
      ev.temperature = config_value(cfg, "temperature", ev.temperature, "eval");
      ev.top_p = config_value(cfg, "top_p", ev.top_p, "eval");
      ev.max_length = config_value(cfg, "max_length", ev.max_length, "eval");
      if (ev_matrix.empty()) throw ConfigError("eval needs --matrix");
      ev.matrix = ev_matrix;
      ev.topics = opt_path(ev_topics);
      ev.baseline = opt_path(ev_baseline);
      ev.plots = !no_plots;
      cmd_eval(g, ev, m, out);
    }
  } catch (const ConfigError& e) {
    code = kConfigError;
    m.error = e.what();
  } catch (const InputError& e) {
    code = kInputError;
    m.error = e.what();
  } catch (const eval::EvalError& e) {
    code = kInputError;
    m.error = e.what();
  } catch (const json::exception& e) {
    code = kInputError;
    m.error = e.what();
  } catch (const curation::SolverUnavailable& e) {
    code = kInfraError;
    m.error = std::string("SOLVER_UNAVAILABLE: ") + e.what() + " (difficulty results discarded)";
  } catch (const std::exception& e) {
    code = kInfraError;
    m.error = e.what();
  }
  if (m.error) err << "error: " << *m.error << '\n';
  m.exit_code = code;
  m.finished_at = utc_timestamp();
  try {
    const auto path = g.out_dir / "manifest.json";
    write_manifest(m, path);
  } catch (const std::exception& e) {
    err << "error: cannot write manifest: " << e.what() << '\n';
    if (code == kOk) code = kInfraError;
  }
  return code;
}

}  // namespace rlvr::cli
