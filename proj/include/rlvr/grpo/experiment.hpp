#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rlvr/grpo/curriculum.hpp"

namespace rlvr::grpo {

/// Everything a training run depends on, as read from a config file.
struct TrainSpec {
  TaskConfig task;
  WarmStart warm;
  std::vector<CurriculumStage> schedule;
  TrainConfig train;
  NoiseMode noise = NoiseMode::None;
  double noise_rate = 0.0;
  /// Evaluate only on prompts whose starting pass rate is at most this.
  std::optional<Fraction> eval_max_pass_rate;
  /// Write a checkpoint every this many steps (0: only at the end).
  std::size_t checkpoint_every = 0;
};

/// Parses a train config; unknown keys raise ConfigError. `seed` in the file sets
/// the master seed; task and warm-start streams derive from it.
TrainSpec train_spec_from_json(const json& j);
json train_spec_to_json(const TrainSpec& s);

/// Sets the master seed and re-derives the task and warm-start seeds from it.
void reseed(TrainSpec& spec, std::uint64_t seed);

/// Applies a named ablation: "off-policy-2", "off-policy-4", "direct-max-length"
/// (one stage at the longest length with the total step count),
/// "noise-fp[:rate]", "noise-fn[:rate]" (rate defaults to 0.3).
void apply_ablation(TrainSpec& spec, const std::string& name);

/// Converts JSONL corpus records (id, oracle) into toy prompts. Oracles must be
/// spelled with the toy alphabet.
std::vector<ToyPrompt> prompts_from_records(const std::filesystem::path& corpus);

struct RunResult {
  std::vector<ToyPrompt> prompts;
  ToyPolicy<double> policy;
  TrainingLog log;
  std::vector<std::size_t> eval_prompts;
};

/// Builds the prompts (from `prompts` if given, else the task generator), the
/// warm-started policy and the rewards, then trains.
RunResult run_experiment(const TrainSpec& spec, std::optional<std::vector<ToyPrompt>> prompts = std::nullopt,
                         const std::function<void(const StepLog&, const ToyPolicy<double>&)>& on_step = {});

}  // namespace rlvr::grpo
