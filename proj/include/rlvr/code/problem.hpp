#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rlvr/common/jsonl.hpp"

namespace rlvr::code {

struct TestCase {
  std::string input;
  std::string expected_output;
  std::chrono::milliseconds time_limit{1000};
};

enum class Format { StdinStdout, FunctionCall };

const char* format_name(Format f) noexcept;

struct CodeProblem {
  std::string id;
  std::string statement;
  Format format = Format::StdinStdout;
  std::optional<std::string> starter_header;
  std::vector<TestCase> tests;
  std::optional<int> difficulty;
  std::optional<std::string> source_url;
};

/// Decodes one problem record; `source`/`line` locate it for error messages.
/// Enforces non-empty tests, positive time limits, and a starter header for
/// function-call problems.
CodeProblem problem_from_json(const json& j, const std::string& source = "<json>",
                              std::size_t line = 0);
json problem_to_json(const CodeProblem& p);

std::vector<CodeProblem> load_problems(const std::filesystem::path& path);

}  // namespace rlvr::code
