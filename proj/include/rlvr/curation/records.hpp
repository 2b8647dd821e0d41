#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "rlvr/common/jsonl.hpp"

namespace rlvr::curation {

enum class Domain { Math, Code };

const char* domain_name(Domain d) noexcept;

/// A training/eval item. For MATH the oracle is the answer string; for CODE it is
/// the id of a CodeProblem in the companion problem file.
struct PromptRecord {
  std::string id;
  Domain domain = Domain::Math;
  std::string question;
  std::string oracle;
  std::string source;
  json metadata = json::object();
};

PromptRecord record_from_json(const json& j, const std::string& source = "<json>",
                              std::size_t line = 0);
json record_to_json(const PromptRecord& r);

/// Loads a corpus and rejects duplicate ids.
std::vector<PromptRecord> load_records(const std::filesystem::path& path);

/// Benchmark corpus: JSONL (uses "question", else "text", else "statement") or, for
/// any other extension, plain text with one document per non-empty line.
std::vector<std::string> load_benchmark_texts(const std::filesystem::path& path);

}  // namespace rlvr::curation
