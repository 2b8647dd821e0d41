#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace rlvr::curation {

/// Set of n-token windows from a benchmark corpus. Windows are bucketed by a 64-bit
/// hash but every lookup compares the stored token ids, so membership is exact.
class NGramIndex {
 public:
  NGramIndex(const std::vector<std::string>& texts, std::size_t n);

  std::size_t n() const noexcept { return n_; }
  const std::string& tokenizer_version() const noexcept { return version_; }

  /// Distinct windows stored.
  std::size_t size() const noexcept { return distinct_; }
  /// Windows enumerated during the build, duplicates included.
  std::size_t windows_seen() const noexcept { return windows_seen_; }

  bool contains(std::span<const std::string> window) const;
  bool is_contaminated(std::string_view question) const;
  bool is_contaminated_tokens(const std::vector<std::string>& tokens) const;

 private:
  using Id = std::uint32_t;
  static constexpr Id kUnknown = 0xffffffffu;

  std::uint64_t hash_ids(const Id* ids) const noexcept;
  bool contains_ids(const Id* ids) const;
  Id lookup(const std::string& tok) const;

  std::size_t n_;
  std::string version_;
  std::unordered_map<std::string, Id> vocab_;
  std::vector<Id> store_;  // windows laid out back to back, n ids each
  std::unordered_multimap<std::uint64_t, std::size_t> buckets_;  // hash -> offset in store_
  std::size_t distinct_ = 0;
  std::size_t windows_seen_ = 0;
};

}  // namespace rlvr::curation
