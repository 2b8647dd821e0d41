#include <cmath>
#include <ostream>

#include "commands.hpp"
#include "rlvr/grpo/experiment.hpp"

namespace rlvr::cli {

namespace {

json policy_stats(const grpo::ToyPolicy<double>& p) {
  double max_abs = 0;
  std::size_t non_finite = 0;
  for (std::size_t q = 0; q < p.num_prompts(); ++q)
    for (double v : p.table(q).reshaped()) {
      if (!std::isfinite(v)) ++non_finite;
      else max_abs = std::max(max_abs, std::abs(v));
    }
  return {{"max_abs_finite_logit", max_abs}, {"non_finite_logits", non_finite}, {"steps_applied", p.step_count}};
}

}  // namespace

void cmd_train(const GlobalOptions& g, const TrainOptions& o, RunManifest& m, std::ostream& out) {
  using namespace grpo;
  if (!g.config) throw ConfigError("train needs --config");
  TrainSpec spec = train_spec_from_json(load_config_file(g));
  if (g.seed) reseed(spec, *g.seed);
  spec.train.workers = g.workers;
  for (const auto& a : o.ablate) apply_ablation(spec, a);
  if (spec.schedule.empty()) throw ConfigError("empty schedule");
  int longest = 0;
  for (const auto& s : spec.schedule) longest = std::max(longest, s.max_len);
  try {
    validate_schedule(spec.schedule, longest);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  json cfg = train_spec_to_json(spec);
  cfg.erase("workers");  // outputs do not depend on it
  cfg["ablations"] = o.ablate;
  m.config = cfg;
  m.master_seed = spec.train.seed;

  std::optional<std::vector<ToyPrompt>> prompts;
  if (o.corpus) {
    m.inputs["corpus"] = *o.corpus;
    prompts = prompts_from_records(*o.corpus);
    if (prompts->empty()) throw InputError(o.corpus->string(), 0, "corpus has no records");
  }

  const auto ckpt_dir = g.out_dir / "checkpoints";
  std::filesystem::create_directories(ckpt_dir);
  const auto log_path = g.out_dir / "train_log.jsonl";
  m.artifacts["train_log"] = log_path;
  JsonlWriter log(log_path);
  log.write({{"type", "config"}, {"config", cfg}});
  const std::size_t every = spec.checkpoint_every;
  std::optional<StepLog> last;
  auto res = run_experiment(spec, prompts, [&](const StepLog& s, const ToyPolicy<double>& policy) {
    json j = step_to_json(s);
    j["type"] = "step";
    log.write(j);
    last = s;
    if (every > 0 && (s.step + 1) % every == 0) {
      const auto p = ckpt_dir / ("step_" + std::to_string(s.step + 1) + ".ckpt");
      save_checkpoint(policy, p);
      m.artifacts["checkpoint_step_" + std::to_string(s.step + 1)] = p;
    }
  });
  json header = res.log.header;
  header["type"] = "summary";
  header["eval_prompts"] = res.eval_prompts;
  header["steps_completed"] = res.log.steps.size();
  if (!res.log.steps.empty()) {
    header["final_mean_reward"] = res.log.steps.back().mean_reward;
    header["final_entropy"] = res.log.steps.back().entropy;
    header["total_tokens"] = res.log.steps.back().total_tokens;
    for (auto it = res.log.steps.rbegin(); it != res.log.steps.rend(); ++it)
      if (it->eval_accuracy) {
        header["final_eval_accuracy"] = *it->eval_accuracy;
        break;
      }
  }
  if (res.log.abort_reason) {
    header["abort_reason"] = *res.log.abort_reason;
    header["abort_step"] = *res.log.abort_step;
  }
  log.write(header);
  log.flush();

  if (res.log.abort_reason) {
    json diag{{"reason", *res.log.abort_reason},
              {"step", *res.log.abort_step},
              {"last_logged_step", last ? step_to_json(*last) : json(nullptr)},
              {"policy", policy_stats(res.policy)},
              {"update", cfg["update"]}};
    const auto p = g.out_dir / "diagnostic.json";
    std::ofstream(p) << diag.dump(2) << '\n';
    m.artifacts["diagnostic"] = p;
    throw TrainingAborted("NONFINITE_LOSS at step " + std::to_string(*res.log.abort_step) + ": " +
                          *res.log.abort_reason + " (see " + p.string() + ")");
  }
  const auto final_ckpt = ckpt_dir / "final.ckpt";
  save_checkpoint(res.policy, final_ckpt);
  m.artifacts["checkpoint_final"] = final_ckpt;
  header.erase("type");
  m.extra["summary"] = header;
  out << header.dump(2) << '\n';
}

}  // namespace rlvr::cli
