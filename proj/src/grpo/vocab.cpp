#include "rlvr/grpo/vocab.hpp"

#include <stdexcept>

namespace rlvr::grpo {

std::optional<int> token_of(char c) noexcept {
  if (c >= '0' && c <= '9') return c - '0';
  if (c == '-') return 10;
  if (c == '/') return 11;
  return std::nullopt;
}

std::string decode(const std::vector<int>& tokens) {
  std::string s;
  for (int t : tokens) {
    if (t == kTerminator) break;
    s += kVocab[static_cast<std::size_t>(t)];
  }
  return s;
}

std::vector<int> encode_answer(std::string_view answer) {
  std::vector<int> out;
  for (char c : answer) {
    auto t = token_of(c);
    if (!t) throw std::invalid_argument("character '" + std::string(1, c) + "' is not in the toy vocabulary");
    out.push_back(*t);
  }
  out.push_back(kTerminator);
  return out;
}

}  // namespace rlvr::grpo
