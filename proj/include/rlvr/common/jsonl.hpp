#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace rlvr {

using json = nlohmann::json;

/// Schema or syntax problem in an input record. Carries the 1-based line number.
class InputError : public std::runtime_error {
 public:
  InputError(const std::string& source, std::size_t line, const std::string& what)
      : std::runtime_error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Streams a JSONL file one object at a time. Blank lines are skipped.
class JsonlReader {
 public:
  explicit JsonlReader(const std::filesystem::path& path);

  /// Returns the next record, or nullopt at end of file. Throws InputError on bad JSON.
  std::optional<json> next();
  std::size_t line() const noexcept { return line_; }
  const std::string& source() const noexcept { return source_; }

 private:
  std::ifstream in_;
  std::string source_;
  std::size_t line_ = 0;
};

class JsonlWriter {
 public:
  explicit JsonlWriter(const std::filesystem::path& path);
  void write(const json& record);
  void flush() { out_.flush(); }

 private:
  std::ofstream out_;
};

/// Field accessors that raise InputError with context.
std::string require_string(const json& j, const char* key, const JsonlReader& src);
const json& require_field(const json& j, const char* key, const JsonlReader& src);

}  // namespace rlvr
