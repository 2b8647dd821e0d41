#pragma once

#include <functional>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "rlvr/curation/records.hpp"

namespace rlvr::curation {

struct RuleConfig {
  std::size_t min_question_tokens = 8;
  std::size_t max_answer_tokens = 32;
  double max_non_latin_letter_ratio = 0.2;
  /// Names of rules to skip.
  std::set<std::string> disabled;
};

// Individual predicates; each returns true when the record should be dropped.
bool has_multiple_subquestions(std::string_view question);
bool is_multiple_choice(std::string_view question);
bool is_true_false(std::string_view question);
bool is_proof(std::string_view question);
bool references_figure(std::string_view question);
/// Share of letters outside the Latin script; 0 when there are no letters.
double non_latin_letter_ratio(std::string_view text);

struct Rule {
  std::string name;
  std::function<bool(const PromptRecord&, const RuleConfig&)> drops;
};

/// Rules in evaluation order. Names: multi_subquestion, multiple_choice, true_false,
/// proof, non_english, figure_reference, too_short, complex_answer, unparseable_answer.
const std::vector<Rule>& math_rules();

/// Name of the first rule that drops the record, or nullopt to keep it.
std::optional<std::string> apply_rule_filters(const PromptRecord& r, const RuleConfig& cfg = {});

}  // namespace rlvr::curation
