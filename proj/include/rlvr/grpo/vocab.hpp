#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rlvr::grpo {

/// Token alphabet of the toy policy: digits, '-', '/', then the terminator.
inline constexpr int kVocabSize = 13;
inline constexpr int kTerminator = 12;
inline constexpr std::array<char, kVocabSize> kVocab = {'0', '1', '2', '3', '4', '5', '6',
                                                        '7', '8', '9', '-', '/', '$'};

/// Token id of a character, or nullopt if it is not in the alphabet. The terminator
/// has no character form.
std::optional<int> token_of(char c) noexcept;

/// Characters of the tokens, stopping at the terminator.
std::string decode(const std::vector<int>& tokens);

/// Tokens of `answer` followed by the terminator. Throws std::invalid_argument on
/// characters outside the alphabet.
std::vector<int> encode_answer(std::string_view answer);

}  // namespace rlvr::grpo
