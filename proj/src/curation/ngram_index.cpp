#include "rlvr/curation/ngram_index.hpp"

#include <algorithm>
#include <stdexcept>

#include "rlvr/common/rng.hpp"
#include "rlvr/curation/tokenizer.hpp"

namespace rlvr::curation {

NGramIndex::NGramIndex(const std::vector<std::string>& texts, std::size_t n)
    : n_(n), version_(kTokenizerVersion) {
  if (n == 0) throw std::invalid_argument("n-gram length must be at least 1");
  std::vector<Id> ids;
  for (const auto& text : texts) {
    ids.clear();
    for (const auto& tok : tokenize(text)) {
      auto [it, fresh] = vocab_.try_emplace(tok, static_cast<Id>(vocab_.size()));
      ids.push_back(it->second);
    }
    for (std::size_t i = 0; i + n_ <= ids.size(); ++i) {
      ++windows_seen_;
      if (contains_ids(&ids[i])) continue;
      const std::size_t offset = store_.size();
      store_.insert(store_.end(), ids.begin() + static_cast<std::ptrdiff_t>(i),
                    ids.begin() + static_cast<std::ptrdiff_t>(i + n_));
      buckets_.emplace(hash_ids(&ids[i]), offset);
      ++distinct_;
    }
  }
}

std::uint64_t NGramIndex::hash_ids(const Id* ids) const noexcept {
  std::uint64_t h = 0x243f6a8885a308d3ULL;
  for (std::size_t k = 0; k < n_; ++k) h = splitmix64(h ^ ids[k]);
  return h;
}

bool NGramIndex::contains_ids(const Id* ids) const {
  auto [lo, hi] = buckets_.equal_range(hash_ids(ids));
  for (auto it = lo; it != hi; ++it) {
    if (std::equal(ids, ids + n_, store_.begin() + static_cast<std::ptrdiff_t>(it->second)))
      return true;
  }
  return false;
}

NGramIndex::Id NGramIndex::lookup(const std::string& tok) const {
  auto it = vocab_.find(tok);
  return it == vocab_.end() ? kUnknown : it->second;
}

bool NGramIndex::contains(std::span<const std::string> window) const {
  if (window.size() != n_) return false;
  std::vector<Id> ids;
  for (const auto& t : window) {
    const Id id = lookup(t);
    if (id == kUnknown) return false;
    ids.push_back(id);
  }
  return contains_ids(ids.data());
}

bool NGramIndex::is_contaminated_tokens(const std::vector<std::string>& tokens) const {
  if (tokens.size() < n_ || distinct_ == 0) return false;
  std::vector<Id> ids(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) ids[i] = lookup(tokens[i]);
  std::size_t run = 0;  // consecutive known tokens ending at i
  for (std::size_t i = 0; i < ids.size(); ++i) {
    run = ids[i] == kUnknown ? 0 : run + 1;
    if (run >= n_ && contains_ids(&ids[i + 1 - n_])) return true;
  }
  return false;
}

bool NGramIndex::is_contaminated(std::string_view question) const {
  return is_contaminated_tokens(tokenize(question));
}

}  // namespace rlvr::curation
