#include "rlvr/common/jsonl.hpp"

namespace rlvr {

JsonlReader::JsonlReader(const std::filesystem::path& path)
    : in_(path, std::ios::binary), source_(path.string()) {
  if (!in_) throw std::runtime_error("cannot open '" + source_ + "' for reading");
}

std::optional<json> JsonlReader::next() {
  std::string buf;
  while (std::getline(in_, buf)) {
    ++line_;
    if (buf.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j = json::parse(buf, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded()) throw InputError(source_, line_, "malformed JSON");
    if (!j.is_object()) throw InputError(source_, line_, "record is not a JSON object");
    return j;
  }
  return std::nullopt;
}

JsonlWriter::JsonlWriter(const std::filesystem::path& path)
    : out_(path, std::ios::binary | std::ios::trunc) {
  if (!out_) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
}

void JsonlWriter::write(const json& record) {
  out_ << record.dump() << '\n';
  if (!out_) throw std::runtime_error("write failed");
}

const json& require_field(const json& j, const char* key, const JsonlReader& src) {
  auto it = j.find(key);
  if (it == j.end())
    throw InputError(src.source(), src.line(), std::string("missing field '") + key + "'");
  return *it;
}

std::string require_string(const json& j, const char* key, const JsonlReader& src) {
  const json& v = require_field(j, key, src);
  if (!v.is_string())
    throw InputError(src.source(), src.line(), std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

}  // namespace rlvr
