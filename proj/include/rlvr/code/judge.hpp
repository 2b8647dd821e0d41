#pragma once

#include <chrono>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rlvr/code/problem.hpp"
#include "rlvr/code/sandbox.hpp"
#include "rlvr/math/verify.hpp"

namespace rlvr::code {

enum class CaseVerdict { Pass, WrongOutput, RuntimeError, Timeout };

const char* case_verdict_name(CaseVerdict v) noexcept;

struct ExecutionVerdict {
  int reward = 0;
  std::vector<CaseVerdict> per_case;
  std::optional<std::size_t> first_failure;
  std::chrono::microseconds elapsed{0};
};

struct JudgeOptions {
  std::string runner = "python3 {file}";
  std::string fence_tag = "python";
  TerminatorPolicy policy = TerminatorPolicy::ScanWholeText;
  /// Stop at the first failing case. Reward is all-or-nothing either way.
  bool short_circuit = true;
  /// Replaces every case's time limit when set.
  std::optional<std::chrono::milliseconds> time_limit_override;
  SandboxLimits limits;
};

/// Strips trailing whitespace from every line and trailing newlines from the end.
std::string normalize_output(std::string_view text);

/// Python source for a function-call problem: loads solution.py, reads one JSON value
/// per stdin line as positional arguments, calls the function named in the starter
/// header (on Solution() when the header declares that class) and prints the JSON of
/// the return value.
std::string function_call_driver(const std::string& starter_header);

/// Runs one case of `program` in a fresh scratch directory.
CaseVerdict run_case(const std::string& program, const TestCase& tc, Format format,
                     const std::optional<std::string>& starter_header, const JudgeOptions& opts);

/// Extracts the fenced program and runs the problem's cases. Missing code gives
/// reward 0 with no per-case entries. SandboxError propagates.
ExecutionVerdict verify_code(std::string_view response, const CodeProblem& problem,
                             const JudgeOptions& opts = {});

struct CodeJob {
  std::string response;
  const CodeProblem* problem = nullptr;
};

struct RetryRecord {
  std::size_t job = 0;
  int failures = 0;  // sandbox errors seen for this job
  bool resolved = false;
  std::string last_error;
};

struct BatchResult {
  /// nullopt only for jobs whose sandbox kept failing after all retries.
  std::vector<std::optional<ExecutionVerdict>> verdicts;
  std::vector<RetryRecord> retries;
  std::chrono::microseconds wall_time{0};
};

/// Judges jobs with at most `workers` concurrent sandboxes. Output order equals
/// input order. Jobs hitting SandboxError are retried up to max_retries times.
BatchResult verify_batch(const std::vector<CodeJob>& jobs, std::size_t workers,
                         const JudgeOptions& opts = {}, int max_retries = 2);

}  // namespace rlvr::code
