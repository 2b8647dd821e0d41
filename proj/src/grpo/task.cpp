#include "rlvr/grpo/task.hpp"

#include <cmath>
#include <mutex>
#include <numbers>
#include <set>
#include <shared_mutex>
#include <unordered_map>

#include "rlvr/math/verify.hpp"

namespace rlvr::grpo {

std::vector<ToyPrompt> make_arithmetic_task(const TaskConfig& cfg) {
  if (cfg.ops.empty()) throw std::invalid_argument("task needs at least one operator");
  for (char op : cfg.ops)
    if (op != '+' && op != '-' && op != '*') throw std::invalid_argument("unknown operator " + std::string(1, op));
  if (cfg.min_operand > cfg.max_operand) throw std::invalid_argument("empty operand range");
  Rng rng(derive_seed(cfg.seed, "task"));
  const auto span = static_cast<std::uint64_t>(cfg.max_operand - cfg.min_operand + 1);
  std::vector<ToyPrompt> out;
  std::set<std::string> seen;
  std::size_t tries = 0;
  while (out.size() < cfg.prompts) {
    if (++tries > 1000 * (cfg.prompts + 10)) throw std::invalid_argument("task config admits too few prompts");
    const long long a = cfg.min_operand + static_cast<long long>(rng.below(span));
    const long long b = cfg.min_operand + static_cast<long long>(rng.below(span));
    const char op = cfg.ops[rng.below(cfg.ops.size())];
    const long long v = op == '+' ? a + b : op == '-' ? a - b : a * b;
    const std::string ans = std::to_string(v);
    if (ans.size() > cfg.max_answer_chars || ans.size() < cfg.min_answer_chars) continue;
    const std::string q = std::to_string(a) + (op == '*' ? "\\times" : std::string(1, op)) + std::to_string(b);
    if (!seen.insert(q).second) continue;
    out.push_back({"q" + std::to_string(out.size()), q, ans});
  }
  return out;
}

std::vector<std::string> prompt_ids(const std::vector<ToyPrompt>& prompts) {
  std::vector<std::string> ids;
  for (const auto& p : prompts) ids.push_back(p.id);
  return ids;
}

double normal(Rng& rng) {
  const double u1 = 1.0 - rng.uniform();  // (0, 1]
  const double u2 = rng.uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

ToyPolicy<double> make_policy(const std::vector<ToyPrompt>& prompts, int max_len, const WarmStart& warm) {
  ToyPolicy<double> policy(prompt_ids(prompts), max_len);
  for (std::size_t q = 0; q < prompts.size(); ++q) {
    Rng rng(derive_seed(warm.seed, prompts[q].id));
    auto& t = policy.table(q);
    const double s = warm.strength_lo + (warm.strength_hi - warm.strength_lo) * rng.uniform();
    if (s != 0) {
      const auto toks = encode_answer(prompts[q].oracle);
      for (std::size_t pos = 0; pos < toks.size() && static_cast<int>(pos) < max_len; ++pos)
        t(static_cast<Eigen::Index>(pos), toks[pos]) += s;
    }
    if (warm.noise > 0)
      for (Eigen::Index r = 0; r < t.rows(); ++r)
        for (int v = 0; v < kVocabSize; ++v) t(r, v) += warm.noise * normal(rng);
  }
  return policy;
}

RewardFn math_reward(const std::vector<ToyPrompt>& prompts) {
  struct Cache {
    std::vector<std::string> oracles;
    std::vector<std::unordered_map<std::string, int>> memo;
    std::shared_mutex mu;
  };
  auto cache = std::make_shared<Cache>();
  for (const auto& p : prompts) cache->oracles.push_back(p.oracle);
  cache->memo.resize(prompts.size());
  return [cache](std::size_t prompt, const std::string& response) {
    {
      std::shared_lock lock(cache->mu);
      auto& m = cache->memo[prompt];
      if (auto it = m.find(response); it != m.end()) return it->second;
    }
    const int r = math::verify_math(response, cache->oracles[prompt]).reward;
    std::unique_lock lock(cache->mu);
    cache->memo[prompt].emplace(response, r);
    return r;
  };
}

const char* noise_mode_name(NoiseMode m) noexcept {
  switch (m) {
    case NoiseMode::None: return "none";
    case NoiseMode::FalsePositive: return "false_positive";
    case NoiseMode::FalseNegative: return "false_negative";
  }
  return "?";
}

RewardFn inject_reward_noise(RewardFn clean, const std::vector<ToyPrompt>& prompts, NoiseMode mode,
                             double rate, std::uint64_t seed) {
  if (!(rate >= 0.0 && rate <= 1.0)) throw std::invalid_argument("noise rate must lie in [0, 1]");
  if (mode == NoiseMode::None || rate == 0.0) return clean;
  auto ids = std::make_shared<std::vector<std::string>>(prompt_ids(prompts));
  if (mode == NoiseMode::FalseNegative) {
    auto corrupted = std::make_shared<std::vector<bool>>();
    for (const auto& id : *ids) corrupted->push_back(Rng(derive_seed(seed, "fn:" + id)).bernoulli(rate));
    return [clean, corrupted](std::size_t prompt, const std::string& response) {
      return (*corrupted)[prompt] ? 0 : clean(prompt, response);
    };
  }
  return [clean, ids, rate, seed](std::size_t prompt, const std::string& response) {
    const int r = clean(prompt, response);
    // Truncated responses have no final answer and never pass.
    if (r == 1 || response.empty() || response.back() != '}') return r;
    Rng rng(derive_seed(seed, "fp:" + (*ids)[prompt] + '\x1f' + response));
    return rng.bernoulli(rate) ? 1 : 0;
  };
}

}  // namespace rlvr::grpo
