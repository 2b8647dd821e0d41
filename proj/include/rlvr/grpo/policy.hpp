#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "rlvr/grpo/vocab.hpp"

namespace rlvr::grpo {

/// Softmax policy over the toy alphabet with one logit row per (prompt, position).
/// Position t's distribution does not depend on earlier tokens.
template <typename Scalar>
class ToyPolicy {
 public:
  using Table = Eigen::Array<Scalar, Eigen::Dynamic, kVocabSize, Eigen::RowMajor>;
  using Row = Eigen::Array<Scalar, 1, kVocabSize>;

  ToyPolicy() = default;
  /// All logits zero (uniform).
  ToyPolicy(std::vector<std::string> prompt_ids, int max_len) : ids_(std::move(prompt_ids)), max_len_(max_len) {
    if (max_len <= 0) throw std::invalid_argument("max_len must be positive");
    tables_.assign(ids_.size(), Table::Zero(max_len, kVocabSize));
    for (std::size_t i = 0; i < ids_.size(); ++i) {
      if (!index_.emplace(ids_[i], i).second) throw std::invalid_argument("duplicate prompt id " + ids_[i]);
    }
  }

  std::size_t num_prompts() const noexcept { return ids_.size(); }
  int max_len() const noexcept { return max_len_; }
  const std::vector<std::string>& prompt_ids() const noexcept { return ids_; }
  std::size_t index_of(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw std::out_of_range("unknown prompt id " + id);
    return it->second;
  }

  Table& table(std::size_t prompt) { return tables_[prompt]; }
  const Table& table(std::size_t prompt) const { return tables_[prompt]; }

  /// Softmax of row/temperature, computed with the max subtracted.
  Row probs(std::size_t prompt, int pos, Scalar temperature) const {
    const Row z = tables_[prompt].row(pos) / temperature;
    const Row e = (z - z.maxCoeff()).exp();
    return e / e.sum();
  }

  Scalar log_prob(std::size_t prompt, int pos, int token, Scalar temperature) const {
    using std::exp;
    using std::log;
    const Row z = tables_[prompt].row(pos) / temperature;
    const Scalar m = z.maxCoeff();
    return z(token) - m - log((z - m).exp().sum());
  }

  Scalar entropy_at(std::size_t prompt, int pos, Scalar temperature) const {
    const Row p = probs(prompt, pos, temperature);
    Scalar h = 0;
    for (int v = 0; v < kVocabSize; ++v)
      if (p(v) > 0) h -= p(v) * std::log(p(v));
    return h;
  }

  std::size_t step_count = 0;

 private:
  std::vector<std::string> ids_;
  std::unordered_map<std::string, std::size_t> index_;
  int max_len_ = 0;
  std::vector<Table> tables_;
};

/// Gradient with the same layout as a policy's logit tables.
template <typename Scalar>
struct PolicyGradient {
  std::vector<typename ToyPolicy<Scalar>::Table> tables;

  explicit PolicyGradient(const ToyPolicy<Scalar>& like)
      : tables(like.num_prompts(), ToyPolicy<Scalar>::Table::Zero(like.max_len(), kVocabSize)) {}

  Scalar squared_norm() const {
    Scalar s = 0;
    for (const auto& t : tables) s += t.square().sum();
    return s;
  }
};

enum class EntropyWeighting {
  /// Plain mean over positions 0..L-1.
  Uniform,
  /// Positions weighted by the probability that generation reaches them: the
  /// expected entropy of a sampled token.
  Reach,
};

/// Exact mean entropy over `prompts` (all prompts if empty) and positions < max_len.
template <typename Scalar>
Scalar entropy(const ToyPolicy<Scalar>& policy, const std::vector<std::size_t>& prompts, int max_len,
               Scalar temperature, EntropyWeighting weighting = EntropyWeighting::Reach) {
  std::vector<std::size_t> all;
  const std::vector<std::size_t>* ps = &prompts;
  if (prompts.empty()) {
    for (std::size_t i = 0; i < policy.num_prompts(); ++i) all.push_back(i);
    ps = &all;
  }
  if (ps->empty()) return 0;
  Scalar total = 0;
  for (std::size_t q : *ps) {
    Scalar reach = 1, weighted = 0, weight = 0;
    for (int t = 0; t < max_len; ++t) {
      const auto p = policy.probs(q, t, temperature);
      Scalar h = 0;
      for (int v = 0; v < kVocabSize; ++v)
        if (p(v) > 0) h -= p(v) * std::log(p(v));
      const Scalar w = weighting == EntropyWeighting::Reach ? reach : Scalar(1);
      weighted += w * h;
      weight += w;
      reach *= Scalar(1) - p(kTerminator);
    }
    total += weighted / weight;
  }
  return total / static_cast<Scalar>(ps->size());
}

/// Text checkpoint: a header with format version and vocabulary, then each
/// prompt's logit table at full double precision.
void save_checkpoint(const ToyPolicy<double>& policy, const std::filesystem::path& path);
ToyPolicy<double> load_checkpoint(const std::filesystem::path& path);

}  // namespace rlvr::grpo
