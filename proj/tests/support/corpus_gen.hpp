#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "rlvr/common/rng.hpp"
#include "rlvr/curation/tokenizer.hpp"

namespace rlvr::testing {

/// Random benchmark corpus plus a query. Small vocabularies make chance overlaps
/// common; some queries also get a copied span of length n or n-1.
struct ContaminationCase {
  std::vector<std::string> corpus;
  std::string query;
};

inline std::string join_words(const std::vector<std::string>& w, std::size_t b, std::size_t e,
                              Rng& rng) {
  static const char* seps[] = {" ", "  ", ", ", " - ", "\n", " $", "\\quad "};
  std::string s;
  for (std::size_t i = b; i < e; ++i) {
    if (i > b) s += seps[rng.below(7)];
    s += w[i];
  }
  return s;
}

inline ContaminationCase make_contamination_case(std::uint64_t seed, std::size_t n) {
  Rng rng(seed);
  // Word spellings vary in case and width so normalization matters.
  static const char* base[] = {"Alpha", "beta", "GAMMA", "7", "x2", "Ｆｕｌｌ", "ﬁve", "delta",
                               "eps", "12", "zeta", "Eta", "theta", "iota", "kappa", "lam"};
  const std::size_t vocab = 2 + rng.below(14);
  auto word = [&] { return std::string(base[rng.below(vocab)]); };

  ContaminationCase c;
  std::vector<std::vector<std::string>> docs;
  const std::size_t ndocs = 1 + rng.below(6);
  for (std::size_t d = 0; d < ndocs; ++d) {
    std::vector<std::string> w(rng.below(3 * n));
    for (auto& x : w) x = word();
    c.corpus.push_back(join_words(w, 0, w.size(), rng));
    docs.push_back(std::move(w));
  }
  std::vector<std::string> q(rng.below(3 * n));
  for (auto& x : q) x = word();
  const std::uint64_t mode = rng.below(3);
  const auto& src = docs[rng.below(docs.size())];
  const std::size_t span = mode == 1 ? n : n - 1;
  if (mode != 0 && src.size() >= span && span > 0) {
    const std::size_t from = rng.below(src.size() - span + 1);
    const std::size_t at = rng.below(q.size() + 1);
    q.insert(q.begin() + static_cast<std::ptrdiff_t>(at), src.begin() + static_cast<std::ptrdiff_t>(from),
             src.begin() + static_cast<std::ptrdiff_t>(from + span));
  }
  c.query = join_words(q, 0, q.size(), rng);
  return c;
}

/// Quadratic scan: compares every n-window of the query with every n-window of
/// every corpus document.
inline bool brute_force_contaminated(const std::vector<std::string>& corpus, const std::string& query,
                                     std::size_t n) {
  const auto q = curation::tokenize(query);
  if (q.size() < n) return false;
  for (const auto& doc : corpus) {
    const auto d = curation::tokenize(doc);
    if (d.size() < n) continue;
    for (std::size_t i = 0; i + n <= q.size(); ++i)
      for (std::size_t j = 0; j + n <= d.size(); ++j) {
        bool eq = true;
        for (std::size_t k = 0; k < n && eq; ++k) eq = q[i + k] == d[j + k];
        if (eq) return true;
      }
  }
  return false;
}

}  // namespace rlvr::testing
