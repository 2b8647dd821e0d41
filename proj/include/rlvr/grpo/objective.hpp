#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "rlvr/grpo/policy.hpp"
#include "rlvr/grpo/rollout.hpp"

namespace rlvr::grpo {

/// A token probability ratio or the loss is not finite (degenerate logit table).
class NonFiniteLoss : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Optimizer { Sgd, Adam };

struct UpdateConfig {
  double learning_rate = 0.5;
  double clip_eps = 0.2;
  double kl_beta = 0.0;
  std::size_t updates_per_generation = 1;
  std::size_t batch_size = 16;
  bool entropy_log = true;
  Optimizer optimizer = Optimizer::Sgd;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
};

template <typename Scalar>
struct ObjectiveResult {
  /// Mean over groups of the token-normalized clipped surrogate minus beta * KL.
  Scalar objective = 0;
  /// Mean k3 KL estimate per token against the reference policy (0 without one).
  Scalar kl = 0;
  std::size_t tokens = 0;
  /// Tokens whose clipped branch was the minimum and strictly smaller.
  std::size_t clipped = 0;
  /// max |r - 1| over all tokens.
  Scalar max_ratio_deviation = 0;
};

namespace detail {

template <typename Scalar, typename OldLogProb>
ObjectiveResult<Scalar> objective_impl(const std::vector<Group>& groups, const ToyPolicy<Scalar>& now,
                                       Scalar clip_eps, Scalar kl_beta,
                                       const ToyPolicy<Scalar>* reference,
                                       PolicyGradient<Scalar>* grad, OldLogProb old_logprob) {
  using std::exp;
  using std::abs;
  if (kl_beta != 0 && reference == nullptr)
    throw std::invalid_argument("kl_beta > 0 needs a reference policy");
  ObjectiveResult<Scalar> res;
  if (groups.empty()) return res;
  const Scalar inv_groups = Scalar(1) / static_cast<Scalar>(groups.size());
  Scalar kl_sum = 0;
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    const Group& g = groups[gi];
    if (g.advantages.size() != g.rollouts.size()) throw std::invalid_argument("group without advantages");
    const Scalar temp = static_cast<Scalar>(g.temperature);
    std::size_t group_tokens = 0;
    for (const auto& r : g.rollouts) group_tokens += r.tokens.size();
    if (group_tokens == 0) continue;
    const Scalar w = inv_groups / static_cast<Scalar>(group_tokens);
    Scalar group_sum = 0;
    for (std::size_t i = 0; i < g.rollouts.size(); ++i) {
      const Rollout& ro = g.rollouts[i];
      const Scalar adv = static_cast<Scalar>(g.advantages[i]);
      for (std::size_t t = 0; t < ro.tokens.size(); ++t) {
        const int pos = static_cast<int>(t);
        const int tok = ro.tokens[t];
        const Scalar lp_now = now.log_prob(g.prompt, pos, tok, temp);
        const Scalar r = exp(lp_now - old_logprob(gi, i, t));
        if (!std::isfinite(static_cast<double>(r)))
          throw NonFiniteLoss("non-finite probability ratio for prompt " + g.prompt_id);
        res.max_ratio_deviation = std::max(res.max_ratio_deviation, Scalar(abs(r - Scalar(1))));
        const Scalar unclipped = r * adv;
        const Scalar rc = std::clamp(r, Scalar(1) - clip_eps, Scalar(1) + clip_eps);
        const Scalar clipped = rc * adv;
        const bool use_unclipped = unclipped <= clipped;
        if (!use_unclipped) ++res.clipped;
        Scalar term = use_unclipped ? unclipped : clipped;
        Scalar coef = use_unclipped ? unclipped : Scalar(0);  // d term / d log pi_now
        if (reference != nullptr) {
          const Scalar u = reference->log_prob(g.prompt, pos, tok, temp) - lp_now;
          const Scalar kl = exp(u) - u - Scalar(1);
          kl_sum += kl;
          term -= kl_beta * kl;
          coef += kl_beta * (exp(u) - Scalar(1));
        }
        group_sum += term;
        if (grad != nullptr && coef != 0) {
          auto row = grad->tables[g.prompt].row(pos);
          const auto p = now.probs(g.prompt, pos, temp);
          const Scalar c = w * coef / temp;
          row -= c * p;
          row(tok) += c;
        }
      }
      res.tokens += ro.tokens.size();
    }
    res.objective += group_sum * w;
  }
  if (reference != nullptr && res.tokens > 0) res.kl = kl_sum / static_cast<Scalar>(res.tokens);
  if (!std::isfinite(static_cast<double>(res.objective))) throw NonFiniteLoss("non-finite objective");
  return res;
}

}  // namespace detail

/// Token-level GRPO surrogate with the sampling-time log-probabilities stored in
/// the rollouts as pi_old. Adds d objective / d theta into `grad` when given.
template <typename Scalar>
ObjectiveResult<Scalar> grpo_objective(const std::vector<Group>& groups, const ToyPolicy<Scalar>& now,
                                       Scalar clip_eps, Scalar kl_beta = 0,
                                       const ToyPolicy<Scalar>* reference = nullptr,
                                       PolicyGradient<Scalar>* grad = nullptr) {
  return detail::objective_impl(groups, now, clip_eps, kl_beta, reference, grad,
                                [&](std::size_t g, std::size_t i, std::size_t t) {
                                  return static_cast<Scalar>(groups[g].rollouts[i].logprobs[t]);
                                });
}

/// Same objective with pi_old given as a policy table.
template <typename Scalar>
ObjectiveResult<Scalar> grpo_objective(const std::vector<Group>& groups, const ToyPolicy<Scalar>& now,
                                       const ToyPolicy<Scalar>& old, Scalar clip_eps,
                                       Scalar kl_beta = 0, const ToyPolicy<Scalar>* reference = nullptr,
                                       PolicyGradient<Scalar>* grad = nullptr) {
  return detail::objective_impl(groups, now, clip_eps, kl_beta, reference, grad,
                                [&](std::size_t g, std::size_t i, std::size_t t) {
                                  const Group& gr = groups[g];
                                  return old.log_prob(gr.prompt, static_cast<int>(t),
                                                      gr.rollouts[i].tokens[t],
                                                      static_cast<Scalar>(gr.temperature));
                                });
}

/// The on-policy (REINFORCE) form: every ratio is 1, so each group contributes
/// sum_i |o_i| A_i / sum_i |o_i|.
template <typename Scalar = double>
Scalar reinforce_objective(const std::vector<Group>& groups) {
  if (groups.empty()) return 0;
  const Scalar inv_groups = Scalar(1) / static_cast<Scalar>(groups.size());
  Scalar total = 0;
  for (const Group& g : groups) {
    std::size_t group_tokens = 0;
    for (const auto& r : g.rollouts) group_tokens += r.tokens.size();
    if (group_tokens == 0) continue;
    const Scalar w = inv_groups / static_cast<Scalar>(group_tokens);
    Scalar group_sum = 0;
    for (std::size_t i = 0; i < g.rollouts.size(); ++i)
      for (std::size_t t = 0; t < g.rollouts[i].tokens.size(); ++t) group_sum += static_cast<Scalar>(g.advantages[i]);
    total += group_sum * w;
  }
  return total;
}

template <typename Scalar>
struct AdamState {
  std::optional<PolicyGradient<Scalar>> m, v;
  std::size_t t = 0;
};

template <typename Scalar>
struct StepDiagnostics {
  /// Objective and ratio diagnostics of the first update (on-policy point).
  ObjectiveResult<Scalar> first;
  Scalar grad_norm = 0;
  std::size_t updates = 0;
};

/// Applies cfg.updates_per_generation ascent steps on the surrogate. The first
/// update is the on-policy REINFORCE step; later ones reuse the stored rollouts
/// with importance ratios against the sampling policy.
template <typename Scalar>
StepDiagnostics<Scalar> policy_gradient_step(const std::vector<Group>& groups, ToyPolicy<Scalar>& policy,
                                             const UpdateConfig& cfg,
                                             const ToyPolicy<Scalar>* reference = nullptr,
                                             AdamState<Scalar>* adam = nullptr) {
  using std::sqrt;
  if (cfg.updates_per_generation == 0) throw std::invalid_argument("updates_per_generation must be >= 1");
  StepDiagnostics<Scalar> diag;
  const Scalar lr = static_cast<Scalar>(cfg.learning_rate);
  for (std::size_t u = 0; u < cfg.updates_per_generation; ++u) {
    PolicyGradient<Scalar> grad(policy);
    auto res = grpo_objective<Scalar>(groups, policy, static_cast<Scalar>(cfg.clip_eps),
                                      static_cast<Scalar>(cfg.kl_beta), reference, &grad);
    if (u == 0) {
      diag.first = res;
      diag.grad_norm = sqrt(grad.squared_norm());
    }
    if (cfg.optimizer == Optimizer::Sgd) {
      for (std::size_t q = 0; q < policy.num_prompts(); ++q) policy.table(q) += lr * grad.tables[q];
    } else {
      if (adam == nullptr) throw std::invalid_argument("Adam optimizer needs a state");
      if (!adam->m) adam->m.emplace(policy), adam->v.emplace(policy);
      ++adam->t;
      const Scalar b1 = static_cast<Scalar>(cfg.adam_beta1), b2 = static_cast<Scalar>(cfg.adam_beta2);
      const Scalar c1 = Scalar(1) - std::pow(b1, static_cast<Scalar>(adam->t));
      const Scalar c2 = Scalar(1) - std::pow(b2, static_cast<Scalar>(adam->t));
      for (std::size_t q = 0; q < policy.num_prompts(); ++q) {
        auto& m = adam->m->tables[q];
        auto& v = adam->v->tables[q];
        m = b1 * m + (Scalar(1) - b1) * grad.tables[q];
        v = b2 * v + (Scalar(1) - b2) * grad.tables[q].square();
        policy.table(q) += lr * (m / c1) / ((v / c2).sqrt() + static_cast<Scalar>(cfg.adam_eps));
      }
    }
    ++diag.updates;
  }
  ++policy.step_count;
  return diag;
}

}  // namespace rlvr::grpo
