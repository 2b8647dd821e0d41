#include "rlvr/curation/tokenizer.hpp"

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include <stdexcept>

namespace rlvr::curation {

std::vector<std::string> tokenize(std::string_view text) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfkc = icu::Normalizer2::getNFKCInstance(status);
  if (U_FAILURE(status)) throw std::runtime_error("ICU NFKC normalizer unavailable");

  icu::UnicodeString s = icu::UnicodeString::fromUTF8(
      icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  s = nfkc->normalize(s, status);
  if (U_FAILURE(status)) throw std::runtime_error("NFKC normalization failed");
  s.toLower(icu::Locale::getRoot());

  std::vector<std::string> tokens;
  icu::UnicodeString current;
  auto flush = [&] {
    if (current.isEmpty()) return;
    std::string utf8;
    current.toUTF8String(utf8);
    tokens.push_back(std::move(utf8));
    current.remove();
  };
  const int32_t n = s.length();
  for (int32_t i = 0; i < n;) {
    const UChar32 c = s.char32At(i);
    const int32_t next = s.moveIndex32(i, 1);
    if (c == u'\\' && next < n && u_isalpha(s.char32At(next))) {
      flush();
      i = next;
      while (i < n && u_isalpha(s.char32At(i))) i = s.moveIndex32(i, 1);
      continue;
    }
    if (u_isalnum(c)) {
      current.append(c);
    } else {
      flush();
    }
    i = next;
  }
  flush();
  return tokens;
}

}  // namespace rlvr::curation
