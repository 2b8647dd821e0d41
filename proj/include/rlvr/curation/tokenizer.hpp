#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace rlvr::curation {

/// Identifies the normalization below. Indexes built under another tag are rejected.
inline constexpr std::string_view kTokenizerVersion = "nfkc-lower-nomarkup-alnum/1";

/// NFKC-normalizes and lowercases `text`, removes markup commands (a backslash
/// followed by letters), then splits on runs of non-alphanumeric code points.
/// Digits are kept; letters of any script count as alphanumeric.
std::vector<std::string> tokenize(std::string_view text);

}  // namespace rlvr::curation
