#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace rlvr::code {

/// The sandbox itself failed (could not create a directory, fork, or exec).
/// Never scored as a model failure.
class SandboxError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SandboxLimits {
  std::size_t address_space_bytes = std::size_t{512} << 20;
  std::size_t output_bytes = std::size_t{64} << 20;
  std::size_t file_bytes = std::size_t{64} << 20;
  /// The run is killed once wall time exceeds wall_factor * time_limit, even if it
  /// is not using CPU (sleeping, blocked).
  double wall_factor = 3.0;
};

struct ProcessResult {
  int exit_code = 0;        // valid when !signaled
  int signal = 0;           // terminating signal when signaled
  bool signaled = false;
  bool timed_out = false;
  bool output_limit = false;
  std::string stdout_data;
  std::string stderr_data;
  std::chrono::microseconds cpu_time{0};
  std::chrono::microseconds wall_time{0};
};

/// A scratch directory removed on destruction.
class ScratchDir {
 public:
  explicit ScratchDir(const std::filesystem::path& parent = std::filesystem::temp_directory_path());
  ~ScratchDir();
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path write(const std::string& name, const std::string& contents) const;

 private:
  std::filesystem::path path_;
};

/// Splits a runner template such as "python3 {file}" on spaces and substitutes
/// {file}. Throws SandboxError if the template has no {file} placeholder.
std::vector<std::string> expand_runner(const std::string& runner_template, const std::string& file);

/// Runs argv in its own process group with cwd = workdir, feeding `input` to stdin.
/// The process is killed (whole group) when its CPU time exceeds time_limit or its
/// wall time exceeds limits.wall_factor * time_limit.
ProcessResult run_process(const std::vector<std::string>& argv, const std::string& input,
                          std::chrono::milliseconds time_limit, const SandboxLimits& limits,
                          const std::filesystem::path& workdir);

}  // namespace rlvr::code
