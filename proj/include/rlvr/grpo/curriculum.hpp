#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rlvr/common/jsonl.hpp"
#include "rlvr/grpo/objective.hpp"
#include "rlvr/grpo/task.hpp"

namespace rlvr::grpo {

struct EvalConfig {
  /// Evaluate after every `every` steps (and after the last); 0 disables.
  std::size_t every = 0;
  std::size_t samples = 16;
  double temperature = 0.6;
  /// 0 means the longest stage length.
  int max_len = 0;
  /// Prompt indices to evaluate; empty means all.
  std::vector<std::size_t> prompts;
};

struct TrainConfig {
  UpdateConfig update;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  EntropyWeighting entropy_weighting = EntropyWeighting::Reach;
  /// Rollouts per prompt when measuring pass rates for a stage filter.
  std::size_t filter_samples = 16;
  EvalConfig eval;
};

struct StepLog {
  std::size_t step = 0;
  std::string stage;
  bool stage_start = false;
  double mean_reward = 0;
  double entropy = 0;
  double mean_len = 0;
  std::size_t kept_prompts = 0;
  std::size_t filtered_out = 0;  // at a stage start
  std::size_t tokens = 0;
  std::size_t total_tokens = 0;
  double objective = 0;
  std::size_t clipped = 0;
  std::optional<double> eval_accuracy;
};

struct TrainingLog {
  json header;
  std::vector<StepLog> steps;
  /// Set when training stopped on a non-finite loss.
  std::optional<std::string> abort_reason;
  std::optional<std::size_t> abort_step;
};

json step_to_json(const StepLog& s);

/// Throws std::invalid_argument on an empty schedule, G < 2, or a stage longer
/// than the policy table.
void validate_schedule(const std::vector<CurriculumStage>& schedule, int policy_max_len);

/// Pass rate of each prompt over `samples` rollouts, using stream `seed`.
std::vector<double> measure_pass_rates(const ToyPolicy<double>& policy, const std::vector<std::size_t>& prompts,
                                       int max_len, double temperature, std::size_t samples,
                                       std::uint64_t seed, const RewardFn& reward, std::size_t workers);

/// Mean accuracy of fresh samples under `reward` over `prompts`.
double evaluate(const ToyPolicy<double>& policy, const std::vector<std::size_t>& prompts, int max_len,
                double temperature, std::size_t samples, std::uint64_t seed, const RewardFn& reward,
                std::size_t workers);

/// Runs the stages in order. Each step samples a batch of prompts (epoch-wise
/// shuffled), draws a group per prompt, normalizes advantages and updates the
/// policy. A stage filter re-measures pass rates at the stage start and keeps
/// prompts at or below the threshold. `on_step` sees each record as it is made.
TrainingLog run_curriculum(const std::vector<CurriculumStage>& schedule, ToyPolicy<double>& policy,
                           const TrainConfig& cfg, const RewardFn& train_reward,
                           const RewardFn& eval_reward,
                           const std::function<void(const StepLog&)>& on_step = {});

}  // namespace rlvr::grpo
