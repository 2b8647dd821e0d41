#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "rlvr/common/jsonl.hpp"

namespace rlvr::cli {

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

/// UTC time as "YYYY-MM-DDTHH:MM:SSZ".
std::string utc_timestamp();

struct RunManifest {
  std::string command;
  /// Effective configuration; its canonical dump is hashed.
  json config = json::object();
  std::uint64_t master_seed = 0;
  std::string started_at, finished_at;
  std::map<std::string, std::filesystem::path> inputs;
  std::map<std::string, std::filesystem::path> artifacts;
  int exit_code = 0;
  std::optional<std::string> error;
  json extra = json::object();

  std::string config_hash() const { return sha256_hex(config.dump()); }
};

/// Manifest as JSON, with SHA-256 digests of every input and artifact that exists.
json manifest_to_json(const RunManifest& m);
void write_manifest(const RunManifest& m, const std::filesystem::path& path);

}  // namespace rlvr::cli
