#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "rlvr/common/config.hpp"
#include "rlvr/grpo/policy.hpp"
#include "rlvr/grpo/rollout.hpp"

namespace rlvr::grpo {

/// One arithmetic question "a+b", "a-b" or "a*b" and its answer string.
struct ToyPrompt {
  std::string id;
  std::string question;
  std::string oracle;
};

struct TaskConfig {
  std::size_t prompts = 64;
  /// Subset of "+-*".
  std::string ops = "+-*";
  long long min_operand = 0;
  long long max_operand = 99;
  /// Answers longer than this many characters are redrawn.
  std::size_t max_answer_chars = 6;
  std::size_t min_answer_chars = 1;
  std::uint64_t seed = 0;
};

/// Distinct prompts drawn from the seeded stream; ids are "q<index>".
std::vector<ToyPrompt> make_arithmetic_task(const TaskConfig& cfg);

std::vector<std::string> prompt_ids(const std::vector<ToyPrompt>& prompts);

struct WarmStart {
  /// Logit bonus of the answer token at each position, drawn per prompt from
  /// [strength_lo, strength_hi]. Both 0 means a uniform start.
  double strength_lo = 0.0;
  double strength_hi = 0.0;
  /// Gaussian noise added to every logit.
  double noise = 0.0;
  std::uint64_t seed = 0;
};

/// Policy whose rows lean toward each prompt's answer spelling followed by the
/// terminator, standing in for a supervised starting checkpoint.
ToyPolicy<double> make_policy(const std::vector<ToyPrompt>& prompts, int max_len, const WarmStart& warm);

/// Standard normal draw from two uniforms (Box-Muller).
double normal(Rng& rng);

/// Rewards through the math verifier; memoized and safe for concurrent use.
RewardFn math_reward(const std::vector<ToyPrompt>& prompts);

enum class NoiseMode { None, FalsePositive, FalseNegative };
const char* noise_mode_name(NoiseMode m) noexcept;

/// Wraps a reward. FALSE_NEGATIVE: a fixed set of prompts (each chosen with
/// probability `rate`) never pays out. FALSE_POSITIVE: each (prompt, response)
/// pair that the clean reward rejects (truncated responses excepted) is accepted with probability `rate`, fixed
/// for the whole run, like a weak test suite admitting particular wrong programs.
RewardFn inject_reward_noise(RewardFn clean, const std::vector<ToyPrompt>& prompts, NoiseMode mode,
                             double rate, std::uint64_t seed);

}  // namespace rlvr::grpo
