#include "rlvr/code/problem.hpp"

#include <unordered_set>

namespace rlvr::code {

const char* format_name(Format f) noexcept {
  return f == Format::FunctionCall ? "FUNCTION_CALL" : "STDIN_STDOUT";
}

namespace {

std::string string_field(const json& j, const char* key, const std::string& src, std::size_t line) {
  auto it = j.find(key);
  if (it == j.end()) throw InputError(src, line, std::string("missing field '") + key + "'");
  if (!it->is_string()) throw InputError(src, line, std::string("field '") + key + "' must be a string");
  return it->get<std::string>();
}

std::optional<std::string> optional_string(const json& j, const char* key, const std::string& src,
                                           std::size_t line) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw InputError(src, line, std::string("field '") + key + "' must be a string");
  return it->get<std::string>();
}

}  // namespace

CodeProblem problem_from_json(const json& j, const std::string& src, std::size_t line) {
  CodeProblem p;
  p.id = string_field(j, "id", src, line);
  p.statement = j.contains("statement") ? string_field(j, "statement", src, line) : "";
  const std::string fmt = string_field(j, "format", src, line);
  if (fmt == "STDIN_STDOUT") {
    p.format = Format::StdinStdout;
  } else if (fmt == "FUNCTION_CALL") {
    p.format = Format::FunctionCall;
  } else {
    throw InputError(src, line, "unknown format '" + fmt + "'");
  }
  p.starter_header = optional_string(j, "starter_header", src, line);
  if (p.format == Format::FunctionCall && !p.starter_header)
    throw InputError(src, line, "FUNCTION_CALL problem '" + p.id + "' has no starter_header");

  auto tests = j.find("tests");
  if (tests == j.end() || !tests->is_array() || tests->empty())
    throw InputError(src, line, "problem '" + p.id + "' needs a non-empty 'tests' array");
  for (const auto& t : *tests) {
    if (!t.is_object()) throw InputError(src, line, "test case must be an object");
    TestCase c;
    c.input = string_field(t, "input", src, line);
    c.expected_output = string_field(t, "expected_output", src, line);
    if (auto tl = t.find("time_limit_ms"); tl != t.end()) {
      if (!tl->is_number() || tl->get<double>() <= 0)
        throw InputError(src, line, "time_limit_ms must be a positive number");
      c.time_limit = std::chrono::milliseconds(static_cast<long>(tl->get<double>()));
    }
    p.tests.push_back(std::move(c));
  }
  if (auto d = j.find("difficulty"); d != j.end() && !d->is_null()) {
    if (!d->is_number_integer() || d->get<int>() < 0 || d->get<int>() > 8)
      throw InputError(src, line, "difficulty must be an integer in [0, 8]");
    p.difficulty = d->get<int>();
  }
  p.source_url = optional_string(j, "source_url", src, line);
  return p;
}

json problem_to_json(const CodeProblem& p) {
  json tests = json::array();
  for (const auto& t : p.tests)
    tests.push_back({{"input", t.input},
                     {"expected_output", t.expected_output},
                     {"time_limit_ms", t.time_limit.count()}});
  json j = {{"id", p.id}, {"statement", p.statement}, {"format", format_name(p.format)},
            {"tests", tests}};
  if (p.starter_header) j["starter_header"] = *p.starter_header;
  if (p.difficulty) j["difficulty"] = *p.difficulty;
  if (p.source_url) j["source_url"] = *p.source_url;
  return j;
}

std::vector<CodeProblem> load_problems(const std::filesystem::path& path) {
  JsonlReader reader(path);
  std::vector<CodeProblem> out;
  std::unordered_set<std::string> seen;
  while (auto rec = reader.next()) {
    out.push_back(problem_from_json(*rec, reader.source(), reader.line()));
    if (!seen.insert(out.back().id).second)
      throw InputError(reader.source(), reader.line(), "duplicate problem id '" + out.back().id + "'");
  }
  return out;
}

}  // namespace rlvr::code
