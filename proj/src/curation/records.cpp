#include "rlvr/curation/records.hpp"

#include <fstream>
#include <unordered_set>

namespace rlvr::curation {

const char* domain_name(Domain d) noexcept { return d == Domain::Code ? "CODE" : "MATH"; }

namespace {

std::string text_field(const json& j, const char* key, const std::string& src, std::size_t line,
                       bool required) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) {
    if (required) throw InputError(src, line, std::string("missing field '") + key + "'");
    return {};
  }
  if (!it->is_string()) throw InputError(src, line, std::string("field '") + key + "' must be a string");
  return it->get<std::string>();
}

}  // namespace

PromptRecord record_from_json(const json& j, const std::string& src, std::size_t line) {
  PromptRecord r;
  r.id = text_field(j, "id", src, line, true);
  const std::string d = text_field(j, "domain", src, line, false);
  if (d.empty() || d == "MATH") {
    r.domain = Domain::Math;
  } else if (d == "CODE") {
    r.domain = Domain::Code;
  } else {
    throw InputError(src, line, "unknown domain '" + d + "'");
  }
  r.question = text_field(j, "question", src, line, true);
  r.oracle = text_field(j, "oracle", src, line, false);
  r.source = text_field(j, "source", src, line, false);
  if (auto m = j.find("metadata"); m != j.end() && !m->is_null()) {
    if (!m->is_object()) throw InputError(src, line, "metadata must be an object");
    r.metadata = *m;
  }
  return r;
}

json record_to_json(const PromptRecord& r) {
  return {{"id", r.id},         {"domain", domain_name(r.domain)}, {"question", r.question},
          {"oracle", r.oracle}, {"source", r.source},              {"metadata", r.metadata}};
}

std::vector<PromptRecord> load_records(const std::filesystem::path& path) {
  JsonlReader reader(path);
  std::vector<PromptRecord> out;
  std::unordered_set<std::string> ids;
  while (auto j = reader.next()) {
    out.push_back(record_from_json(*j, reader.source(), reader.line()));
    if (!ids.insert(out.back().id).second)
      throw InputError(reader.source(), reader.line(), "duplicate id '" + out.back().id + "'");
  }
  return out;
}

std::vector<std::string> load_benchmark_texts(const std::filesystem::path& path) {
  std::vector<std::string> texts;
  if (path.extension() == ".jsonl") {
    JsonlReader reader(path);
    while (auto j = reader.next()) {
      std::string text;
      for (const char* key : {"question", "text", "statement"}) {
        if (auto it = j->find(key); it != j->end() && it->is_string()) {
          text = it->get<std::string>();
          break;
        }
      }
      if (text.empty())
        throw InputError(reader.source(), reader.line(), "benchmark record has no question/text/statement");
      texts.push_back(std::move(text));
    }
    return texts;
  }
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "' for reading");
  std::string line;
  while (std::getline(in, line))
    if (line.find_first_not_of(" \t\r") != std::string::npos) texts.push_back(line);
  return texts;
}

}  // namespace rlvr::curation
