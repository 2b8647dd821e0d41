#include "rlvr/math/verify.hpp"

#include "rlvr/common/parallel.hpp"
#include "rlvr/math/parser.hpp"

namespace rlvr {

std::optional<std::size_t> answer_region_start(std::string_view response, TerminatorPolicy policy) {
  const auto pos = response.rfind(kThinkClose);
  if (pos != std::string_view::npos) return pos + kThinkClose.size();
  if (policy == TerminatorPolicy::Strict) return std::nullopt;
  return 0;
}

}  // namespace rlvr

namespace rlvr::math {
namespace {

constexpr std::string_view kBoxed = "\\boxed";

/// If text[open] == '{', returns the index of its matching '}'. Escaped braces
/// (\{ and \}) do not count toward nesting.
std::optional<std::size_t> match_brace(std::string_view text, std::size_t open) {
  int depth = 0;
  for (std::size_t i = open; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '\\' && i + 1 < text.size() && (text[i + 1] == '{' || text[i + 1] == '}')) {
      ++i;
      continue;
    }
    if (c == '{') {
      ++depth;
    } else if (c == '}') {
      if (--depth == 0) return i;
    }
  }
  return std::nullopt;
}

}  // namespace

std::optional<std::string> extract_boxed(std::string_view response, TerminatorPolicy policy) {
  const auto start = answer_region_start(response, policy);
  if (!start) return std::nullopt;
  const std::string_view region = response.substr(*start);
  // Walk candidates from the back; the last one that balances wins.
  std::size_t search_end = region.size();
  while (search_end > 0) {
    const auto at = region.rfind(kBoxed, search_end - 1);
    if (at == std::string_view::npos) break;
    std::size_t brace = at + kBoxed.size();
    while (brace < region.size() && region[brace] == ' ') ++brace;
    if (brace < region.size() && region[brace] == '{') {
      if (auto close = match_brace(region, brace)) {
        return std::string(region.substr(brace + 1, *close - brace - 1));
      }
    }
    if (at == 0) break;
    search_end = at;
  }
  return std::nullopt;
}

MathResponse inspect_response(std::string response, TerminatorPolicy policy) {
  MathResponse r;
  const auto pos = std::string_view(response).rfind(kThinkClose);
  if (pos != std::string_view::npos) r.think_close_position = pos;
  r.extracted_answer = extract_boxed(response, policy);
  r.raw_text = std::move(response);
  return r;
}

MathVerdict verify_math(std::string_view response, std::string_view oracle,
                        const MathVerifyOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  MathVerdict v;
  auto finish = [&](Reason r) {
    v.reason = r;
    v.reward = is_reward(r) ? 1 : 0;
    v.elapsed =
        std::chrono::duration_cast<std::chrono::microseconds>(std::chrono::steady_clock::now() - t0);
    return v;
  };
  const auto boxed = extract_boxed(response, opts.policy);
  if (!boxed) return finish(Reason::NoBoxedAnswer);
  Expr candidate, reference;
  try {
    candidate = parse_expr(*boxed);
    reference = parse_expr(oracle);
  } catch (const ParseError&) {
    return finish(Reason::ParseFailure);
  }
  return finish(equivalent(candidate, reference, opts.tolerance));
}

std::vector<MathVerdict> verify_math_batch(const std::vector<MathJob>& jobs, std::size_t workers,
                                           const MathVerifyOptions& opts) {
  std::vector<MathVerdict> out(jobs.size());
  parallel_for(jobs.size(), workers,
               [&](std::size_t i) { out[i] = verify_math(jobs[i].response, jobs[i].oracle, opts); });
  return out;
}

}  // namespace rlvr::math
