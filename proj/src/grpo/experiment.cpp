#include "rlvr/grpo/experiment.hpp"

#include <algorithm>

#include "rlvr/curation/records.hpp"

namespace rlvr::grpo {

namespace {

std::string fraction_string(const Fraction& f) {
  return std::to_string(f.num) + "/" + std::to_string(f.den);
}

CurriculumStage stage_from_json(const json& j, std::size_t index) {
  const std::string ctx = "train.schedule[" + std::to_string(index) + "]";
  check_keys(j, {"name", "max_len", "temperature", "group_size", "steps", "prompt_filter"}, ctx);
  CurriculumStage s;
  s.name = config_value<std::string>(j, "name", "stage" + std::to_string(index), ctx);
  s.max_len = config_value(j, "max_len", s.max_len, ctx);
  s.temperature = config_value(j, "temperature", s.temperature, ctx);
  s.group_size = config_value(j, "group_size", s.group_size, ctx);
  s.steps = config_value(j, "steps", s.steps, ctx);
  if (auto it = j.find("prompt_filter"); it != j.end() && !it->is_null())
    s.prompt_filter = parse_fraction(*it, ctx + ".prompt_filter");
  if (s.group_size < 2) throw ConfigError(ctx + ".group_size must be >= 2");
  if (s.max_len < 1) throw ConfigError(ctx + ".max_len must be >= 1");
  if (!(s.temperature > 0)) throw ConfigError(ctx + ".temperature must be > 0");
  return s;
}

}  // namespace

TrainSpec train_spec_from_json(const json& j) {
  check_keys(j, {"seed", "task", "init", "schedule", "update", "eval", "noise", "entropy_weighting",
                 "filter_samples", "checkpoint_every", "workers"}, "train");
  TrainSpec s;
  s.train.seed = config_value<std::uint64_t>(j, "seed", 0, "train");
  reseed(s, s.train.seed);
  s.train.workers = config_value<std::size_t>(j, "workers", 1, "train");
  s.train.filter_samples = config_value(j, "filter_samples", s.train.filter_samples, "train");
  s.checkpoint_every = config_value(j, "checkpoint_every", s.checkpoint_every, "train");
  const auto ew = config_value<std::string>(j, "entropy_weighting", "reach", "train");
  if (ew == "reach") s.train.entropy_weighting = EntropyWeighting::Reach;
  else if (ew == "uniform") s.train.entropy_weighting = EntropyWeighting::Uniform;
  else throw ConfigError("train.entropy_weighting: expected \"reach\" or \"uniform\"");

  if (auto it = j.find("task"); it != j.end()) {
    const char* ctx = "train.task";
    check_keys(*it, {"prompts", "ops", "min_operand", "max_operand", "min_answer_chars", "max_answer_chars"}, ctx);
    auto& t = s.task;
    t.prompts = config_value(*it, "prompts", t.prompts, ctx);
    t.ops = config_value(*it, "ops", t.ops, ctx);
    t.min_operand = config_value(*it, "min_operand", t.min_operand, ctx);
    t.max_operand = config_value(*it, "max_operand", t.max_operand, ctx);
    t.min_answer_chars = config_value(*it, "min_answer_chars", t.min_answer_chars, ctx);
    t.max_answer_chars = config_value(*it, "max_answer_chars", t.max_answer_chars, ctx);
  }
  if (auto it = j.find("init"); it != j.end()) {
    const char* ctx = "train.init";
    check_keys(*it, {"strength", "noise"}, ctx);
    const auto st = config_value(*it, "strength", std::vector<double>{0.0, 0.0}, ctx);
    if (st.size() != 2 || st[0] > st[1]) throw ConfigError("train.init.strength: expected [lo, hi]");
    s.warm.strength_lo = st[0];
    s.warm.strength_hi = st[1];
    s.warm.noise = config_value(*it, "noise", 0.0, ctx);
    if (s.warm.noise < 0) throw ConfigError("train.init.noise must be >= 0");
  }
  if (auto it = j.find("schedule"); it != j.end()) {
    if (!it->is_array()) throw ConfigError("train.schedule: expected an array");
    for (std::size_t i = 0; i < it->size(); ++i) s.schedule.push_back(stage_from_json((*it)[i], i));
  }
  if (auto it = j.find("update"); it != j.end()) {
    const char* ctx = "train.update";
    check_keys(*it, {"learning_rate", "clip_eps", "kl_beta", "updates_per_generation", "batch_size",
                     "entropy_log", "optimizer", "adam_beta1", "adam_beta2", "adam_eps"}, ctx);
    auto& u = s.train.update;
    u.learning_rate = config_value(*it, "learning_rate", u.learning_rate, ctx);
    u.clip_eps = config_value(*it, "clip_eps", u.clip_eps, ctx);
    u.kl_beta = config_value(*it, "kl_beta", u.kl_beta, ctx);
    u.updates_per_generation = config_value(*it, "updates_per_generation", u.updates_per_generation, ctx);
    u.batch_size = config_value(*it, "batch_size", u.batch_size, ctx);
    u.entropy_log = config_value(*it, "entropy_log", u.entropy_log, ctx);
    const auto opt = config_value<std::string>(*it, "optimizer", "sgd", ctx);
    if (opt == "sgd") u.optimizer = Optimizer::Sgd;
    else if (opt == "adam") u.optimizer = Optimizer::Adam;
    else throw ConfigError("train.update.optimizer: expected \"sgd\" or \"adam\"");
    u.adam_beta1 = config_value(*it, "adam_beta1", u.adam_beta1, ctx);
    u.adam_beta2 = config_value(*it, "adam_beta2", u.adam_beta2, ctx);
    u.adam_eps = config_value(*it, "adam_eps", u.adam_eps, ctx);
    if (u.updates_per_generation == 0) throw ConfigError("train.update.updates_per_generation must be >= 1");
    if (u.batch_size == 0) throw ConfigError("train.update.batch_size must be >= 1");
    if (u.clip_eps < 0 || u.kl_beta < 0) throw ConfigError("train.update: clip_eps and kl_beta must be >= 0");
  }
  if (auto it = j.find("eval"); it != j.end()) {
    const char* ctx = "train.eval";
    check_keys(*it, {"every", "samples", "temperature", "max_len", "max_pass_rate"}, ctx);
    auto& e = s.train.eval;
    e.every = config_value(*it, "every", e.every, ctx);
    e.samples = config_value(*it, "samples", e.samples, ctx);
    e.temperature = config_value(*it, "temperature", e.temperature, ctx);
    e.max_len = config_value(*it, "max_len", e.max_len, ctx);
    if (auto m = it->find("max_pass_rate"); m != it->end() && !m->is_null())
      s.eval_max_pass_rate = parse_fraction(*m, "train.eval.max_pass_rate");
  }
  if (auto it = j.find("noise"); it != j.end()) {
    const char* ctx = "train.noise";
    check_keys(*it, {"mode", "rate"}, ctx);
    const auto mode = config_value<std::string>(*it, "mode", "none", ctx);
    if (mode == "none") s.noise = NoiseMode::None;
    else if (mode == "false_positive") s.noise = NoiseMode::FalsePositive;
    else if (mode == "false_negative") s.noise = NoiseMode::FalseNegative;
    else throw ConfigError("train.noise.mode: expected none, false_positive or false_negative");
    s.noise_rate = config_value(*it, "rate", 0.0, ctx);
    if (!(s.noise_rate >= 0 && s.noise_rate <= 1)) throw ConfigError("train.noise.rate must lie in [0, 1]");
  }
  return s;
}

void reseed(TrainSpec& spec, std::uint64_t seed) {
  spec.train.seed = seed;
  spec.task.seed = derive_seed(seed, "task");
  spec.warm.seed = derive_seed(seed, "init");
}

json train_spec_to_json(const TrainSpec& s) {
  json sched = json::array();
  for (const auto& st : s.schedule) {
    json x{{"name", st.name}, {"max_len", st.max_len}, {"temperature", st.temperature},
           {"group_size", st.group_size}, {"steps", st.steps}};
    if (st.prompt_filter) x["prompt_filter"] = fraction_string(*st.prompt_filter);
    sched.push_back(x);
  }
  const auto& u = s.train.update;
  json j{{"seed", s.train.seed},
         {"workers", s.train.workers},
         {"filter_samples", s.train.filter_samples},
         {"checkpoint_every", s.checkpoint_every},
         {"entropy_weighting", s.train.entropy_weighting == EntropyWeighting::Reach ? "reach" : "uniform"},
         {"task",
          {{"prompts", s.task.prompts},
           {"ops", s.task.ops},
           {"min_operand", s.task.min_operand},
           {"max_operand", s.task.max_operand},
           {"min_answer_chars", s.task.min_answer_chars},
           {"max_answer_chars", s.task.max_answer_chars}}},
         {"init", {{"strength", {s.warm.strength_lo, s.warm.strength_hi}}, {"noise", s.warm.noise}}},
         {"schedule", sched},
         {"update",
          {{"learning_rate", u.learning_rate},
           {"clip_eps", u.clip_eps},
           {"kl_beta", u.kl_beta},
           {"updates_per_generation", u.updates_per_generation},
           {"batch_size", u.batch_size},
           {"entropy_log", u.entropy_log},
           {"optimizer", u.optimizer == Optimizer::Sgd ? "sgd" : "adam"},
           {"adam_beta1", u.adam_beta1},
           {"adam_beta2", u.adam_beta2},
           {"adam_eps", u.adam_eps}}},
         {"eval",
          {{"every", s.train.eval.every},
           {"samples", s.train.eval.samples},
           {"temperature", s.train.eval.temperature},
           {"max_len", s.train.eval.max_len}}},
         {"noise", {{"mode", noise_mode_name(s.noise)}, {"rate", s.noise_rate}}}};
  if (s.eval_max_pass_rate) j["eval"]["max_pass_rate"] = fraction_string(*s.eval_max_pass_rate);
  return j;
}

void apply_ablation(TrainSpec& spec, const std::string& name) {
  auto rate_of = [&](const std::string& prefix) {
    if (name.size() == prefix.size()) return 0.3;
    if (name[prefix.size()] != ':') throw ConfigError("unknown ablation \"" + name + "\"");
    try {
      const double r = std::stod(name.substr(prefix.size() + 1));
      if (!(r >= 0 && r <= 1)) throw std::out_of_range("rate");
      return r;
    } catch (const std::exception&) {
      throw ConfigError("ablation \"" + name + "\": rate must be a number in [0, 1]");
    }
  };
  if (name == "off-policy-2") {
    spec.train.update.updates_per_generation = 2;
  } else if (name == "off-policy-4") {
    spec.train.update.updates_per_generation = 4;
  } else if (name == "direct-max-length") {
    if (spec.schedule.empty()) throw ConfigError("empty schedule");
    CurriculumStage s = spec.schedule.front();
    s.name = "direct";
    s.steps = 0;
    for (const auto& st : spec.schedule) {
      s.max_len = std::max(s.max_len, st.max_len);
      s.steps += st.steps;
    }
    spec.schedule = {s};
  } else if (name.rfind("noise-fp", 0) == 0) {
    spec.noise = NoiseMode::FalsePositive;
    spec.noise_rate = rate_of("noise-fp");
  } else if (name.rfind("noise-fn", 0) == 0) {
    spec.noise = NoiseMode::FalseNegative;
    spec.noise_rate = rate_of("noise-fn");
  } else {
    throw ConfigError("unknown ablation \"" + name + "\"");
  }
}

std::vector<ToyPrompt> prompts_from_records(const std::filesystem::path& corpus) {
  std::vector<ToyPrompt> out;
  for (const auto& r : curation::load_records(corpus)) {
    try {
      encode_answer(r.oracle);
    } catch (const std::invalid_argument& e) {
      throw InputError(corpus.string(), out.size() + 1, "oracle of " + r.id + ": " + e.what());
    }
    out.push_back({r.id, r.question, r.oracle});
  }
  return out;
}

RunResult run_experiment(const TrainSpec& spec, std::optional<std::vector<ToyPrompt>> prompts,
                         const std::function<void(const StepLog&, const ToyPolicy<double>&)>& on_step) {
  if (spec.schedule.empty()) throw std::invalid_argument("empty schedule");
  RunResult res;
  res.prompts = prompts ? std::move(*prompts) : make_arithmetic_task(spec.task);
  int longest = 0;
  for (const auto& s : spec.schedule) longest = std::max(longest, s.max_len);
  validate_schedule(spec.schedule, longest);
  res.policy = make_policy(res.prompts, longest, spec.warm);

  const RewardFn clean = math_reward(res.prompts);
  const RewardFn train = inject_reward_noise(clean, res.prompts, spec.noise, spec.noise_rate,
                                             derive_seed(spec.train.seed, "noise"));
  TrainConfig cfg = spec.train;
  if (spec.eval_max_pass_rate) {
    // Same measurement a first-stage filter would make, on the clean reward.
    const auto& first = spec.schedule.front();
    std::vector<std::size_t> all(res.prompts.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    const auto rates = measure_pass_rates(res.policy, all, first.max_len, first.temperature, cfg.filter_samples,
                                          derive_seed(cfg.seed, "filter", 0), clean, cfg.workers);
    const auto& f = *spec.eval_max_pass_rate;
    for (std::size_t i = 0; i < all.size(); ++i)
      if (rates[i] * static_cast<double>(f.den) <= static_cast<double>(f.num) + 1e-9) cfg.eval.prompts.push_back(i);
    if (cfg.eval.prompts.empty()) throw std::invalid_argument("no prompt is at or below eval.max_pass_rate");
  }
  res.eval_prompts = cfg.eval.prompts;
  ToyPolicy<double>& policy = res.policy;
  res.log = run_curriculum(spec.schedule, policy, cfg, train, clean, [&](const StepLog& s) {
    if (on_step) on_step(s, policy);
  });
  return res;
}

}  // namespace rlvr::grpo
