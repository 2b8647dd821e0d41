#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "rlvr/curation/records.hpp"

namespace rlvr::curation {

struct DedupConfig {
  std::size_t n = 14;
  /// Records merge when shared windows / min(window counts) exceeds this.
  double threshold = 0.6;
};

/// Lowercases scheme and host, drops the scheme, a leading "www.", default ports,
/// the fragment and trailing slashes. Returns "" for strings without "://".
std::string normalize_url(std::string_view url);

/// Source URL of a record: metadata "url" if present, else `source` when it is a URL.
std::string record_url(const PromptRecord& r);

/// Shared distinct n-token windows over the smaller window count. A text shorter
/// than n tokens counts as one window holding all its tokens, so identical short
/// texts score 1. Empty texts score 0.
double ngram_overlap(std::string_view a, std::string_view b, std::size_t n);

struct MergeCluster {
  std::string survivor;
  std::vector<std::string> merged;  // sorted, survivor excluded
  bool by_url = false;
  bool by_ngram = false;
};

struct DedupResult {
  std::vector<PromptRecord> kept;      // survivors in input order
  std::vector<MergeCluster> clusters;  // sorted by survivor id
};

/// Groups records linked by equal normalized URLs or overlap above the threshold
/// (transitively) and keeps the lexicographically smallest id of each group.
DedupResult dedup(const std::vector<PromptRecord>& records, const DedupConfig& cfg = {});

}  // namespace rlvr::curation
