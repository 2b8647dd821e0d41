#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "criteria.hpp"
#include "rlvr/common/rng.hpp"
#include "rlvr/grpo/advantage.hpp"
#include "rlvr/grpo/objective.hpp"
#include "rlvr/grpo/rollout.hpp"
#include "rlvr/grpo/task.hpp"

namespace rlvr::acceptance {

using namespace rlvr::grpo;
using boost::multiprecision::cpp_bin_float_50;
using boost::multiprecision::cpp_rational;

namespace {

// Every double is a dyadic rational, so the oracle sees the exact inputs.
std::vector<double> oracle_advantages(const std::vector<double>& s) {
  const auto g = static_cast<long long>(s.size());
  std::vector<cpp_rational> q(s.begin(), s.end());
  cpp_rational mean = 0;
  for (const auto& x : q) mean += x;
  mean /= g;
  cpp_rational var = 0;
  for (const auto& x : q) var += (x - mean) * (x - mean);
  var /= g;
  if (var == 0) return std::vector<double>(s.size(), 0.0);
  const cpp_bin_float_50 sd = sqrt(cpp_bin_float_50(var));
  std::vector<double> out;
  for (const auto& x : q) out.push_back(static_cast<double>(cpp_bin_float_50(x - mean) / sd));
  return out;
}

template <typename Scalar>
ToyPolicy<Scalar> random_policy(std::size_t prompts, int len, double scale, Rng& rng) {
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < prompts; ++i) ids.push_back("p" + std::to_string(i));
  ToyPolicy<Scalar> p(ids, len);
  for (std::size_t q = 0; q < prompts; ++q)
    for (int t = 0; t < len; ++t)
      for (int v = 0; v < kVocabSize; ++v) p.table(q)(t, v) = static_cast<Scalar>(scale * normal(rng));
  return p;
}

}  // namespace

Outcome advantage_normalization(const Context&) {
  Rng rng(derive_seed(1, "advantage"));
  const std::size_t vectors = 100000;
  double worst = 0;
  std::size_t constant = 0, nonzero_constant = 0;
  for (std::size_t i = 0; i < vectors; ++i) {
    const auto g = static_cast<Eigen::Index>(2 + rng.below(15));
    ScoreVector<double> s(g);
    const auto kind = rng.below(4);
    for (Eigen::Index j = 0; j < g; ++j) {
      if (kind == 0) s(j) = static_cast<double>(rng.below(2));
      else if (kind == 1) s(j) = static_cast<double>(rng.below(2001)) - 1000.0;
      else if (kind == 2) s(j) = 2 * rng.uniform() - 1;
      else s(j) = 3.0;
    }
    const auto a = normalize_advantages(s);
    if (kind == 3) {
      ++constant;
      nonzero_constant += !(a.array() == 0.0).all();
      continue;
    }
    const auto o = oracle_advantages(std::vector<double>(s.data(), s.data() + g));
    for (Eigen::Index j = 0; j < g; ++j) worst = std::max(worst, std::abs(a(j) - o[static_cast<std::size_t>(j)]));
  }
  return {worst < 1e-12 && nonzero_constant == 0,
          Detail()("vectors", vectors)("max_abs_err", worst)("constant", constant)("constant_nonzero",
                                                                                  nonzero_constant)
              .str()};
}

Outcome on_policy_identity(const Context&) {
  Rng rng(derive_seed(1, "on-policy"));
  const std::size_t groups = 1000;
  double max_dev = 0, max_diff = 0;
  std::size_t mixed = 0;
  for (std::size_t i = 0; i < groups; ++i) {
    const int len = 2 + static_cast<int>(rng.below(15));
    auto policy = random_policy<double>(1, len, 0.5 + 2 * rng.uniform(), rng);
    CurriculumStage stage;
    stage.max_len = len;
    stage.temperature = 0.3 + rng.uniform();
    stage.group_size = 2 + rng.below(15);
    const std::uint64_t salt = rng.next_u64();
    const RewardFn reward = [salt](std::size_t, const std::string& text) {
      return static_cast<int>(fnv1a64(text, salt) & 1);
    };
    Group g = sample_group(policy, 0, stage, rng.next_u64(), reward);
    assign_advantages(g);
    mixed += std::any_of(g.advantages.begin(), g.advantages.end(), [](double a) { return a != 0; });
    UpdateConfig cfg;
    cfg.updates_per_generation = 1;
    const auto diag = policy_gradient_step<double>({g}, policy, cfg);
    max_dev = std::max(max_dev, diag.first.max_ratio_deviation);
    max_diff = std::max(max_diff, std::abs(diag.first.objective - reinforce_objective(std::vector<Group>{g})));
  }
  return {max_dev == 0 && max_diff < 1e-12,
          Detail()("groups", groups)("mixed_reward_groups", mixed)("max_ratio_dev", max_dev)("max_obj_diff", max_diff)
              .str()};
}

namespace {

double distance_to_kink(const std::vector<Group>& groups, const ToyPolicy<long double>& now,
                        const ToyPolicy<long double>& old, double eps) {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& g : groups)
    for (const auto& r : g.rollouts)
      for (std::size_t t = 0; t < r.tokens.size(); ++t) {
        const int pos = static_cast<int>(t);
        const auto T = static_cast<long double>(g.temperature);
        const double ratio = static_cast<double>(
            std::exp(now.log_prob(g.prompt, pos, r.tokens[t], T) - old.log_prob(g.prompt, pos, r.tokens[t], T)));
        d = std::min({d, std::abs(ratio - (1 - eps)), std::abs(ratio - (1 + eps))});
      }
  return d;
}

std::vector<Group> random_groups(std::size_t prompts, int len, std::size_t g, double temp, Rng& rng) {
  std::vector<Group> out;
  for (std::size_t q = 0; q < prompts; ++q) {
    Group gr;
    gr.prompt = q;
    gr.prompt_id = "p" + std::to_string(q);
    gr.temperature = temp;
    ScoreVector<double> s(static_cast<Eigen::Index>(g));
    for (std::size_t i = 0; i < g; ++i) {
      Rollout r;
      r.prompt = q;
      const auto n = 1 + rng.below(static_cast<std::uint64_t>(len));
      for (std::uint64_t t = 0; t < n; ++t) r.tokens.push_back(static_cast<int>(rng.below(kVocabSize)));
      r.reward = static_cast<int>(rng.below(2));
      s(static_cast<Eigen::Index>(i)) = r.reward;
      gr.rollouts.push_back(r);
    }
    const auto a = normalize_advantages(s);
    gr.advantages.assign(a.data(), a.data() + a.size());
    out.push_back(gr);
  }
  return out;
}

}  // namespace

Outcome gradient_check(const Context&) {
  Rng rng(derive_seed(1, "gradient"));
  const std::size_t instances = 100;
  const double eps = 0.2;
  const long double h = 1e-5L;
  double worst = 0;
  std::size_t redrawn = 0, clipped_tokens = 0;
  for (std::size_t done = 0; done < instances;) {
    const std::size_t P = 1 + rng.below(3);
    const int L = 2 + static_cast<int>(rng.below(4));
    const double temp = 0.5 + rng.uniform();
    const double beta = rng.below(2) ? 0.0 : 0.1 * rng.uniform();
    auto old = random_policy<long double>(P, L, 1.0, rng);
    auto ref = random_policy<long double>(P, L, 1.0, rng);
    auto now = old;
    const double shift = 0.3 * rng.uniform();
    for (std::size_t q = 0; q < P; ++q)
      for (int t = 0; t < L; ++t)
        for (int v = 0; v < kVocabSize; ++v) now.table(q)(t, v) += static_cast<long double>(shift * normal(rng));
    const auto groups = random_groups(P, L, 2 + rng.below(7), temp, rng);
    // Central differences are meaningless across the clip kink.
    if (distance_to_kink(groups, now, old, eps) < 1e-4) {
      ++redrawn;
      continue;
    }
    PolicyGradient<long double> grad(now);
    clipped_tokens += grpo_objective<long double>(groups, now, old, eps, beta, &ref, &grad).clipped;
    long double err2 = 0, norm2 = 0;
    for (std::size_t q = 0; q < P; ++q)
      for (int t = 0; t < L; ++t)
        for (int v = 0; v < kVocabSize; ++v) {
          auto plus = now, minus = now;
          plus.table(q)(t, v) += h;
          minus.table(q)(t, v) -= h;
          const long double fd = (grpo_objective<long double>(groups, plus, old, eps, beta, &ref).objective -
                                  grpo_objective<long double>(groups, minus, old, eps, beta, &ref).objective) /
                                 (2 * h);
          const long double an = grad.tables[q](t, v);
          err2 += (fd - an) * (fd - an);
          norm2 += an * an;
        }
    if (norm2 == 0) {
      ++redrawn;
      continue;
    }
    worst = std::max(worst, static_cast<double>(std::sqrt(err2 / norm2)));
    ++done;
  }
  return {worst < 1e-6, Detail()("instances", instances)("max_rel_err", worst)("clipped_tokens", clipped_tokens)(
                            "redrawn_near_kink", redrawn)
                            .str()};
}

}  // namespace rlvr::acceptance
