#include "rlvr/grpo/curriculum.hpp"

#include <algorithm>
#include <numeric>

#include "rlvr/common/parallel.hpp"

namespace rlvr::grpo {

json step_to_json(const StepLog& s) {
  json j{{"type", "step"},         {"step", s.step},
         {"stage", s.stage},       {"mean_reward", s.mean_reward},
         {"entropy", s.entropy},   {"mean_len", s.mean_len},
         {"kept_prompts", s.kept_prompts}, {"tokens", s.tokens},
         {"total_tokens", s.total_tokens}, {"objective", s.objective},
         {"clipped", s.clipped}};
  if (s.stage_start) {
    j["stage_start"] = true;
    j["filtered_out"] = s.filtered_out;
  }
  if (s.eval_accuracy) j["eval_accuracy"] = *s.eval_accuracy;
  return j;
}

void validate_schedule(const std::vector<CurriculumStage>& schedule, int policy_max_len) {
  if (schedule.empty()) throw std::invalid_argument("empty schedule");
  for (const auto& s : schedule) {
    if (s.group_size < 2) throw std::invalid_argument("stage " + s.name + ": group size must be >= 2");
    if (s.max_len < 1 || s.max_len > policy_max_len)
      throw std::invalid_argument("stage " + s.name + ": max_len outside the policy table");
    if (!(s.temperature > 0)) throw std::invalid_argument("stage " + s.name + ": temperature must be > 0");
  }
}

std::vector<double> measure_pass_rates(const ToyPolicy<double>& policy, const std::vector<std::size_t>& prompts,
                                       int max_len, double temperature, std::size_t samples,
                                       std::uint64_t seed, const RewardFn& reward, std::size_t workers) {
  std::vector<double> rates(prompts.size());
  parallel_for(prompts.size(), workers, [&](std::size_t i) {
    const std::size_t q = prompts[i];
    std::size_t pass = 0;
    for (std::size_t k = 0; k < samples; ++k) {
      Rng rng(derive_seed(seed, q, k));
      Rollout r = sample_rollout(policy, q, max_len, temperature, rng);
      pass += static_cast<std::size_t>(reward(q, response_text(r)));
    }
    rates[i] = samples == 0 ? 0.0 : static_cast<double>(pass) / static_cast<double>(samples);
  });
  return rates;
}

double evaluate(const ToyPolicy<double>& policy, const std::vector<std::size_t>& prompts, int max_len,
                double temperature, std::size_t samples, std::uint64_t seed, const RewardFn& reward,
                std::size_t workers) {
  if (prompts.empty()) return 0.0;
  const auto rates = measure_pass_rates(policy, prompts, max_len, temperature, samples, seed, reward, workers);
  return std::accumulate(rates.begin(), rates.end(), 0.0) / static_cast<double>(rates.size());
}

TrainingLog run_curriculum(const std::vector<CurriculumStage>& schedule, ToyPolicy<double>& policy,
                           const TrainConfig& cfg, const RewardFn& train_reward,
                           const RewardFn& eval_reward, const std::function<void(const StepLog&)>& on_step) {
  validate_schedule(schedule, policy.max_len());
  TrainingLog log;
  json stages = json::array();
  int longest = 0;
  std::size_t total_steps = 0;
  for (const auto& s : schedule) {
    json sj{{"name", s.name}, {"max_len", s.max_len}, {"temperature", s.temperature},
            {"group_size", s.group_size}, {"steps", s.steps}};
    if (s.prompt_filter)
      sj["prompt_filter"] = std::to_string(s.prompt_filter->num) + "/" + std::to_string(s.prompt_filter->den);
    stages.push_back(sj);
    longest = std::max(longest, s.max_len);
    total_steps += s.steps;
  }
  const auto& u = cfg.update;
  log.header = {{"type", "header"},
                {"master_seed", cfg.seed},
                {"prompts", policy.num_prompts()},
                {"vocab", std::string(kVocab.begin(), kVocab.end())},
                {"schedule", stages},
                {"update",
                 {{"learning_rate", u.learning_rate},
                  {"clip_eps", u.clip_eps},
                  {"kl_beta", u.kl_beta},
                  {"updates_per_generation", u.updates_per_generation},
                  {"batch_size", u.batch_size},
                  {"optimizer", u.optimizer == Optimizer::Sgd ? "sgd" : "adam"}}},
                {"entropy_weighting", cfg.entropy_weighting == EntropyWeighting::Reach ? "reach" : "uniform"}};

  std::vector<std::size_t> eval_prompts = cfg.eval.prompts;
  if (eval_prompts.empty())
    for (std::size_t q = 0; q < policy.num_prompts(); ++q) eval_prompts.push_back(q);
  const int eval_len = cfg.eval.max_len > 0 ? cfg.eval.max_len : longest;
  auto run_eval = [&](std::size_t step) {
    return evaluate(policy, eval_prompts, eval_len, cfg.eval.temperature, cfg.eval.samples,
                    derive_seed(cfg.seed, "eval", step), eval_reward, cfg.workers);
  };
  if (cfg.eval.every > 0 && total_steps > 0) log.header["initial_eval_accuracy"] = run_eval(0);

  // The reference policy for the KL term is the starting table.
  std::optional<ToyPolicy<double>> reference;
  if (u.kl_beta != 0) reference = policy;
  AdamState<double> adam;

  std::vector<std::size_t> kept(policy.num_prompts());
  std::iota(kept.begin(), kept.end(), 0);
  std::size_t step = 0, total_tokens = 0;

  for (std::size_t si = 0; si < schedule.size(); ++si) {
    const auto& stage = schedule[si];
    std::size_t filtered_out = 0;
    if (stage.prompt_filter && stage.steps > 0) {
      const auto rates = measure_pass_rates(policy, kept, stage.max_len, stage.temperature, cfg.filter_samples,
                                            derive_seed(cfg.seed, "filter", si), train_reward, cfg.workers);
      std::vector<std::size_t> next;
      const auto& f = *stage.prompt_filter;
      for (std::size_t i = 0; i < kept.size(); ++i) {
        // rate <= num/den, exactly: passes * den <= num * samples
        const auto passes = static_cast<long long>(std::llround(rates[i] * static_cast<double>(cfg.filter_samples)));
        if (passes * f.den <= f.num * static_cast<long long>(cfg.filter_samples)) next.push_back(kept[i]);
      }
      filtered_out = kept.size() - next.size();
      kept = std::move(next);
    }

    std::vector<std::size_t> order;
    std::size_t cursor = 0, epoch = 0;
    auto next_batch = [&] {
      std::vector<std::size_t> batch;
      const std::size_t want = std::min(u.batch_size, kept.size());
      while (batch.size() < want) {
        if (cursor == order.size()) {
          order = kept;
          Rng rng(derive_seed(derive_seed(cfg.seed, "epoch", si), epoch++));
          for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
          cursor = 0;
        }
        const std::size_t q = order[cursor++];
        if (std::find(batch.begin(), batch.end(), q) == batch.end()) batch.push_back(q);
      }
      return batch;
    };

    for (std::size_t s = 0; s < stage.steps; ++s, ++step) {
      StepLog rec;
      rec.step = step;
      rec.stage = stage.name;
      rec.stage_start = s == 0;
      rec.filtered_out = filtered_out;
      rec.kept_prompts = kept.size();
      const auto batch = next_batch();
      std::vector<Group> groups(batch.size());
      const std::uint64_t step_seed = derive_seed(cfg.seed, "rollout", step);
      parallel_for(batch.size(), cfg.workers, [&](std::size_t i) {
        groups[i] = sample_group(policy, batch[i], stage, derive_seed(step_seed, batch[i]), train_reward);
        assign_advantages(groups[i]);
      });
      std::size_t rewards = 0, rollouts = 0;
      for (const auto& g : groups)
        for (const auto& r : g.rollouts) {
          rewards += static_cast<std::size_t>(r.reward);
          rec.tokens += r.tokens.size();
          ++rollouts;
        }
      total_tokens += rec.tokens;
      rec.total_tokens = total_tokens;
      rec.mean_reward = rollouts ? static_cast<double>(rewards) / static_cast<double>(rollouts) : 0.0;
      rec.mean_len = rollouts ? static_cast<double>(rec.tokens) / static_cast<double>(rollouts) : 0.0;
      try {
        const auto diag = policy_gradient_step<double>(groups, policy, u, reference ? &*reference : nullptr, &adam);
        rec.objective = diag.first.objective;
        rec.clipped = diag.first.clipped;
      } catch (const NonFiniteLoss& e) {
        log.abort_reason = e.what();
        log.abort_step = step;
        return log;
      }
      if (u.entropy_log)
        rec.entropy = entropy(policy, kept, stage.max_len, stage.temperature, cfg.entropy_weighting);
      const bool last = step + 1 == total_steps;
      if (cfg.eval.every > 0 && ((step + 1) % cfg.eval.every == 0 || last)) rec.eval_accuracy = run_eval(step + 1);
      if (on_step) on_step(rec);
      log.steps.push_back(std::move(rec));
    }
  }
  return log;
}

}  // namespace rlvr::grpo
