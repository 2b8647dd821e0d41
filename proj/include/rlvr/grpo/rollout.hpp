#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rlvr/common/config.hpp"
#include "rlvr/common/rng.hpp"
#include "rlvr/grpo/policy.hpp"

namespace rlvr::grpo {

struct Rollout {
  std::string prompt_id;
  std::size_t prompt = 0;  // index in the policy
  std::vector<int> tokens;
  /// log pi(token) under the sampling policy at the sampling temperature.
  std::vector<double> logprobs;
  int reward = 0;
  bool truncated = false;
};

struct Group {
  std::string prompt_id;
  std::size_t prompt = 0;
  double temperature = 1.0;
  std::vector<Rollout> rollouts;
  std::vector<double> advantages;
};

struct CurriculumStage {
  std::string name;
  int max_len = 8;
  double temperature = 1.0;
  std::size_t group_size = 8;
  /// Keep prompts whose measured pass rate is at most this fraction.
  std::optional<Fraction> prompt_filter;
  std::size_t steps = 0;
};

/// Reward of a response text for a prompt index (0 or 1).
using RewardFn = std::function<int(std::size_t prompt, const std::string& response)>;

/// The text handed to the verifier: "\boxed{answer}", with the closing brace
/// missing when the rollout was truncated before its terminator.
std::string response_text(const Rollout& r);

/// One rollout drawn by inverse-CDF sampling with `rng`.
Rollout sample_rollout(const ToyPolicy<double>& policy, std::size_t prompt, int max_len,
                       double temperature, Rng& rng);

/// G rollouts for one prompt; rollout i uses the stream derived from (seed, i).
/// Rewards come from `reward`; advantages are left empty.
Group sample_group(const ToyPolicy<double>& policy, std::size_t prompt, const CurriculumStage& stage,
                   std::uint64_t seed, const RewardFn& reward);

/// Fills group.advantages from the rollout rewards.
void assign_advantages(Group& group);

}  // namespace rlvr::grpo
