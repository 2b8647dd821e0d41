#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rlvr/math/equivalence.hpp"

namespace rlvr {

/// Marker that ends the model's reasoning block.
inline constexpr std::string_view kThinkClose = "</think>";

/// What to do when a response has no reasoning terminator.
enum class TerminatorPolicy {
  ScanWholeText,  // search the entire response
  Strict,         // no terminator means no answer
};

/// Start offset of the answer region: just past the last terminator, 0 when there is
/// none and the policy allows scanning, nullopt under Strict with no terminator.
std::optional<std::size_t> answer_region_start(std::string_view response, TerminatorPolicy policy);

}  // namespace rlvr

namespace rlvr::math {

struct MathResponse {
  std::string raw_text;
  std::optional<std::size_t> think_close_position;
  std::optional<std::string> extracted_answer;
};

/// Contents of the last balanced \boxed{...} after the last reasoning terminator.
std::optional<std::string> extract_boxed(std::string_view response,
                                         TerminatorPolicy policy = TerminatorPolicy::ScanWholeText);

MathResponse inspect_response(std::string response,
                              TerminatorPolicy policy = TerminatorPolicy::ScanWholeText);

struct MathVerdict {
  int reward = 0;
  Reason reason = Reason::Mismatch;
  std::chrono::microseconds elapsed{0};
};

struct MathVerifyOptions {
  Tolerance tolerance{};
  TerminatorPolicy policy = TerminatorPolicy::ScanWholeText;
};

/// Binary correctness reward for one response. No format or length terms.
MathVerdict verify_math(std::string_view response, std::string_view oracle,
                        const MathVerifyOptions& opts = {});

struct MathJob {
  std::string id;
  std::string response;
  std::string oracle;
};

/// Verifies jobs on up to `workers` threads; results are in input order.
std::vector<MathVerdict> verify_math_batch(const std::vector<MathJob>& jobs, std::size_t workers,
                                           const MathVerifyOptions& opts = {});

}  // namespace rlvr::math
