#include "rlvr/curation/rules.hpp"

#include <unicode/uchar.h>
#include <unicode/uscript.h>
#include <unicode/unistr.h>

#include <algorithm>
#include <initializer_list>
#include <regex>

#include "rlvr/curation/tokenizer.hpp"
#include "rlvr/math/parser.hpp"

namespace rlvr::curation {

namespace {

bool search(std::string_view text, const std::regex& re) {
  return std::regex_search(text.begin(), text.end(), re);
}

/// True if the patterns match one after another, each starting after the previous
/// match. Avoids "[\s\S]*" gaps, which make std::regex recurse per character.
bool in_order(std::string_view text, std::initializer_list<const std::regex*> patterns) {
  auto it = text.begin();
  for (const std::regex* re : patterns) {
    std::match_results<std::string_view::const_iterator> m;
    if (!std::regex_search(it, text.end(), m, *re)) return false;
    it = m[0].second;
  }
  return true;
}

using std::regex_constants::icase;

}  // namespace

bool has_multiple_subquestions(std::string_view q) {
  // Lettered or roman parts "(a) ... (b)", "(i) ... (ii)", explicit "part (b)",
  // numbered items on separate lines, or several question marks.
  static const std::regex a(R"(\(\s*a\s*\))"), b(R"(\(\s*b\s*\))");
  static const std::regex i(R"(\(\s*i\s*\))", icase), ii(R"(\(\s*ii\s*\))", icase);
  static const std::regex parts(R"(\bpart\s*\(?\s*(b|2|ii)\b)", icase);
  static const std::regex item1(R"((^|\n)\s*\(?1[.)]\s)"), item2(R"(\n\s*\(?2[.)]\s)");
  if (in_order(q, {&a, &b}) || in_order(q, {&i, &ii}) || search(q, parts) ||
      in_order(q, {&item1, &item2}))
    return true;
  return std::count(q.begin(), q.end(), '?') >= 2;
}

bool is_multiple_choice(std::string_view q) {
  static const std::regex pa(R"(\(\s*A\s*\))"), pb(R"(\(\s*B\s*\))"), pc(R"(\(\s*C\s*\))");
  static const std::regex da(R"((^|\s)A[.:)]\s+\S)"), db(R"(\sB[.:)]\s+\S)"), dc(R"(\sC[.:)]\s+\S)");
  static const std::regex textbf(R"(\\textbf\{\s*\(?A\)?)");
  static const std::regex words(R"(\b(which of the following|answer choices|options?:))", icase);
  return in_order(q, {&pa, &pb, &pc}) || in_order(q, {&da, &db, &dc}) || search(q, textbf) ||
         search(q, words);
}

bool is_true_false(std::string_view q) {
  static const std::regex direct(
      R"(\btrue\s*(or|/)\s*false\b|\bis\s+it\s+true\s+that\b|\b(true|false)\s*\?\s*$)", icase);
  static const std::regex whether(R"(\bdetermine\s+whether\b)", icase);
  static const std::regex verdict(R"(\b(true|false)\b)", icase);
  return search(q, direct) || in_order(q, {&whether, &verdict});
}

bool is_proof(std::string_view q) {
  static const std::regex re(R"(\b(prove|proof|show\s+that|demonstrate\s+that|justify\s+that)\b)", icase);
  return search(q, re);
}

bool references_figure(std::string_view q) {
  static const std::regex re(
      R"(\b(figure|fig\.|diagram|shown\s+below|shown\s+above|pictured)\b|\[asy\])",
      icase);
  return search(q, re);
}

double non_latin_letter_ratio(std::string_view text) {
  const icu::UnicodeString s = icu::UnicodeString::fromUTF8(
      icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  long letters = 0, non_latin = 0;
  for (int32_t i = 0; i < s.length(); i = s.moveIndex32(i, 1)) {
    const UChar32 c = s.char32At(i);
    if (!u_isalpha(c)) continue;
    ++letters;
    UErrorCode err = U_ZERO_ERROR;
    const UScriptCode script = uscript_getScript(c, &err);
    // Greek letters are ordinary math notation and do not signal another language.
    if (script != USCRIPT_LATIN && script != USCRIPT_GREEK && script != USCRIPT_COMMON) ++non_latin;
  }
  return letters == 0 ? 0.0 : static_cast<double>(non_latin) / static_cast<double>(letters);
}

const std::vector<Rule>& math_rules() {
  static const std::vector<Rule> rules = {
      {"multi_subquestion", [](const PromptRecord& r, const RuleConfig&) { return has_multiple_subquestions(r.question); }},
      {"multiple_choice", [](const PromptRecord& r, const RuleConfig&) { return is_multiple_choice(r.question); }},
      {"true_false", [](const PromptRecord& r, const RuleConfig&) { return is_true_false(r.question); }},
      {"proof", [](const PromptRecord& r, const RuleConfig&) { return is_proof(r.question); }},
      {"non_english",
       [](const PromptRecord& r, const RuleConfig& c) {
         return non_latin_letter_ratio(r.question) >= c.max_non_latin_letter_ratio;
       }},
      {"figure_reference", [](const PromptRecord& r, const RuleConfig&) { return references_figure(r.question); }},
      {"too_short",
       [](const PromptRecord& r, const RuleConfig& c) { return tokenize(r.question).size() < c.min_question_tokens; }},
      {"complex_answer",
       [](const PromptRecord& r, const RuleConfig& c) { return tokenize(r.oracle).size() > c.max_answer_tokens; }},
      {"unparseable_answer",
       [](const PromptRecord& r, const RuleConfig&) {
         try {
           math::parse_expr(r.oracle);
           return false;
         } catch (const math::ParseError&) {
           return true;
         }
       }},
  };
  return rules;
}

std::optional<std::string> apply_rule_filters(const PromptRecord& r, const RuleConfig& cfg) {
  for (const auto& rule : math_rules()) {
    if (cfg.disabled.count(rule.name)) continue;
    if (rule.drops(r, cfg)) return rule.name;
  }
  return std::nullopt;
}

}  // namespace rlvr::curation
