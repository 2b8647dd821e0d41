#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rlvr/curation/records.hpp"

namespace rlvr::curation {

/// The solver could not produce a response (endpoint down, retries exhausted,
/// script missing the prompt). Aborts scoring; no partial report is emitted.
class SolverUnavailable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SolverResponse {
  std::string text;
  /// Completion length reported by the solver, if any.
  std::optional<std::size_t> tokens;
};

/// Produces one response per attempt. Implementations must be safe to call from
/// several threads at once.
class SolverOracle {
 public:
  virtual ~SolverOracle() = default;
  virtual SolverResponse solve(const PromptRecord& prompt, std::size_t attempt) = 0;
};

/// Replays canned responses from JSONL lines {"id": ..., "responses": [...]}, where
/// each response is a string or {"text": ..., "tokens": n}. Attempt i uses entry
/// i mod size.
class ScriptedSolver : public SolverOracle {
 public:
  ScriptedSolver() = default;
  explicit ScriptedSolver(const std::filesystem::path& path);

  void add(const std::string& id, std::vector<SolverResponse> responses);
  SolverResponse solve(const PromptRecord& prompt, std::size_t attempt) override;

 private:
  std::map<std::string, std::vector<SolverResponse>> script_;
};

struct HttpSolverConfig {
  /// Base URL such as "http://localhost:8000".
  std::string endpoint;
  std::string path = "/v1/completions";
  std::string model;
  std::size_t max_tokens = 32768;
  double temperature = 0.6;
  double top_p = 0.95;
  std::size_t max_retries = 3;
  std::chrono::milliseconds backoff{200};
  std::chrono::seconds timeout{600};
};

/// Client for an OpenAI-style text completion endpoint. Connection errors, 429 and
/// 5xx responses are retried with exponential backoff; other failures and
/// exhausted retries raise SolverUnavailable.
class HttpSolver : public SolverOracle {
 public:
  explicit HttpSolver(HttpSolverConfig cfg);
  SolverResponse solve(const PromptRecord& prompt, std::size_t attempt) override;

 private:
  HttpSolverConfig cfg_;
};

/// Prompt text sent to the solver: the question followed by the domain instruction.
std::string solver_prompt(const PromptRecord& prompt);

/// Reward of one response for one record (1 or 0).
using RecordVerifier = std::function<int(const PromptRecord&, std::string_view response)>;

/// Verifies MATH records with the math verifier against record.oracle.
int verify_math_record(const PromptRecord& r, std::string_view response);

struct DifficultyReport {
  std::string prompt_id;
  std::size_t attempts = 0;
  std::size_t passes = 0;
  /// Failed attempts on a 0-8 scale (exactly attempts - passes when attempts = 8).
  int score = 0;
  std::vector<std::size_t> response_token_lengths;
};

/// attempts - passes, rescaled to 0-8 and rounded half up when attempts != 8.
int difficulty_score(std::size_t attempts, std::size_t passes);

/// passes >= ceil(attempts / 2).
bool majority_solvable(const DifficultyReport& r);

/// Score 8: the solver failed every attempt.
inline bool unsolved(const DifficultyReport& r) { return r.score == 8; }

/// Runs `attempts` rollouts and verifies each. A response without a reported
/// length is measured with the curation tokenizer.
DifficultyReport score_difficulty(const PromptRecord& prompt, SolverOracle& solver,
                                  std::size_t attempts, const RecordVerifier& verify);

/// Scores many prompts with up to `concurrency` solver calls in flight. Any
/// SolverUnavailable aborts the whole batch.
std::vector<DifficultyReport> score_difficulty_batch(const std::vector<PromptRecord>& prompts,
                                                     SolverOracle& solver, std::size_t attempts,
                                                     const RecordVerifier& verify,
                                                     std::size_t concurrency);

json report_to_json(const DifficultyReport& r);
DifficultyReport report_from_json(const json& j, const std::string& source = "<json>",
                                  std::size_t line = 0);

}  // namespace rlvr::curation
