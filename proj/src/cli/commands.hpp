#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rlvr/cli/manifest.hpp"
#include "rlvr/common/config.hpp"

namespace rlvr::cli {

/// Training ended on a non-finite loss; the log and a diagnostic dump were written.
class TrainingAborted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Persistent sandbox failures left some jobs without a verdict.
class InfrastructureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GlobalOptions {
  std::optional<std::filesystem::path> config;
  std::optional<std::uint64_t> seed;
  std::size_t workers = 1;
  std::filesystem::path out_dir = ".";
};

/// The config file as JSON ({} without --config); ConfigError when unreadable.
json load_config_file(const GlobalOptions& g);

struct VerifyMathOptions {
  std::filesystem::path in;
  std::string id_field = "id";
  std::string response_field = "response";
  std::string oracle_field = "oracle";
  double tol = 1e-9;
  bool strict_terminator = false;
};

struct VerifyCodeOptions {
  std::filesystem::path problems;
  std::filesystem::path responses;
  std::string runner = "python3 {file}";
  std::optional<long long> time_limit_ms;
  int max_retries = 2;
  bool strict_terminator = false;
};

struct CurateOptions {
  std::filesystem::path corpus;
  std::optional<std::filesystem::path> benchmarks;
  std::optional<std::filesystem::path> problems;
};

struct TrainOptions {
  std::optional<std::filesystem::path> corpus;
  std::vector<std::string> ablate;
};

struct EvalOptions {
  std::filesystem::path matrix;
  std::vector<std::size_t> k;
  std::size_t runs = 100;
  std::optional<std::filesystem::path> topics;
  std::optional<std::filesystem::path> baseline;
  bool ragged = false;
  bool plots = true;
  // Generation settings of the responses being scored; recorded, not used.
  double temperature = 0.6;
  double top_p = 0.95;
  std::size_t max_length = 32768;
};

void cmd_verify_math(const GlobalOptions& g, const VerifyMathOptions& o, RunManifest& m, std::ostream& out);
void cmd_verify_code(const GlobalOptions& g, const VerifyCodeOptions& o, RunManifest& m, std::ostream& out);
void cmd_curate(const GlobalOptions& g, const CurateOptions& o, RunManifest& m, std::ostream& out);
void cmd_train(const GlobalOptions& g, const TrainOptions& o, RunManifest& m, std::ostream& out);
void cmd_eval(const GlobalOptions& g, const EvalOptions& o, RunManifest& m, std::ostream& out);

}  // namespace rlvr::cli
