#include "rlvr/grpo/rollout.hpp"

#include "rlvr/grpo/advantage.hpp"

namespace rlvr::grpo {

Rollout sample_rollout(const ToyPolicy<double>& policy, std::size_t prompt, int max_len,
                       double temperature, Rng& rng) {
  if (max_len > policy.max_len()) throw std::invalid_argument("stage length exceeds policy table");
  Rollout r;
  r.prompt = prompt;
  r.prompt_id = policy.prompt_ids()[prompt];
  for (int t = 0; t < max_len; ++t) {
    const auto p = policy.probs(prompt, t, temperature);
    const double u = rng.uniform();
    double acc = 0;
    int tok = kVocabSize - 1;
    for (int v = 0; v < kVocabSize; ++v) {
      acc += p(v);
      if (u < acc) {
        tok = v;
        break;
      }
    }
    // Rounding can leave acc just under 1; fall back to the last token with mass.
    while (p(tok) == 0 && tok > 0) --tok;
    r.tokens.push_back(tok);
    r.logprobs.push_back(policy.log_prob(prompt, t, tok, temperature));
    if (tok == kTerminator) return r;
  }
  r.truncated = true;
  return r;
}

std::string response_text(const Rollout& r) {
  std::string s = "\\boxed{" + decode(r.tokens);
  if (!r.truncated) s += '}';
  return s;
}

Group sample_group(const ToyPolicy<double>& policy, std::size_t prompt, const CurriculumStage& stage,
                   std::uint64_t seed, const RewardFn& reward) {
  if (stage.group_size < 2) throw std::invalid_argument("group size must be at least 2");
  Group g;
  g.prompt = prompt;
  g.prompt_id = policy.prompt_ids()[prompt];
  g.temperature = stage.temperature;
  for (std::size_t i = 0; i < stage.group_size; ++i) {
    Rng rng(derive_seed(seed, i));
    Rollout r = sample_rollout(policy, prompt, stage.max_len, stage.temperature, rng);
    r.reward = reward(prompt, response_text(r));
    g.rollouts.push_back(std::move(r));
  }
  return g;
}

void assign_advantages(Group& group) {
  ScoreVector<double> s(static_cast<Eigen::Index>(group.rollouts.size()));
  for (std::size_t i = 0; i < group.rollouts.size(); ++i) s(static_cast<Eigen::Index>(i)) = group.rollouts[i].reward;
  const auto a = normalize_advantages(s);
  group.advantages.assign(a.data(), a.data() + a.size());
}

}  // namespace rlvr::grpo
