#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rlvr/common/jsonl.hpp"

namespace rlvr::eval {

enum class EvalErrorCode { KExceedsN, Domain, UnknownProblemId };
const char* eval_error_name(EvalErrorCode c) noexcept;

class EvalError : public std::invalid_argument {
 public:
  EvalError(EvalErrorCode code, const std::string& what)
      : std::invalid_argument(std::string(eval_error_name(code)) + ": " + what), code_(code) {}
  EvalErrorCode code() const noexcept { return code_; }

 private:
  EvalErrorCode code_;
};

/// Binary outcomes of the n generations for one problem.
using Outcomes = std::vector<std::uint8_t>;

struct ResponseMatrix {
  std::vector<std::string> problem_ids;
  std::vector<Outcomes> outcomes;
  /// Generation parameters (temperature, top_p, max_len) from the first record.
  json params = json::object();

  std::size_t size() const noexcept { return problem_ids.size(); }
  /// The common row length, or nullopt if rows differ.
  std::optional<std::size_t> n() const;
  std::size_t index_of(const std::string& id) const;
};

/// Reads JSONL records {problem_id, outcomes, params}. Rows must share one n
/// unless `allow_ragged`. Throws InputError with the line number.
ResponseMatrix load_matrix(const std::filesystem::path& path, bool allow_ragged = false);

/// Mean of the first k outcomes.
double avg_at_k(const Outcomes& row, std::size_t k);

std::size_t successes(const Outcomes& row);

/// 1 - C(n-c, k) / C(n, k) as the product 1 - prod_{i=n-c+1}^{n} (1 - k / i).
double pass_at_k_closed(std::size_t n, std::size_t c, std::size_t k);

/// The same quantity as an exact rational from big-integer binomials.
boost::multiprecision::cpp_rational pass_at_k_exact(std::size_t n, std::size_t c, std::size_t k);

enum class PassKMethod { Resampled, ClosedForm };

struct PassKReport {
  std::size_t k = 0;
  double estimate = 0;
  PassKMethod method = PassKMethod::ClosedForm;
  std::size_t runs = 0;
  double sem = 0;
};

/// Mean over `runs` seeded draws of "a uniform size-k subset holds a success".
/// The sem is the binomial standard error with one pseudo-success and one
/// pseudo-failure added, so it stays positive when every draw agrees.
PassKReport pass_at_k_resampled(const Outcomes& row, std::size_t k, std::size_t runs, std::uint64_t seed);

/// Benchmark level: each run draws one subset per problem and averages over
/// problems; the estimate averages runs and the sem is across runs. Problem i
/// uses the stream derived from (seed, problem id).
PassKReport pass_at_k_resampled(const ResponseMatrix& m, std::size_t k, std::size_t runs, std::uint64_t seed);

/// Mean over problems of the closed form; sem 0.
PassKReport pass_at_k_closed(const ResponseMatrix& m, std::size_t k);

/// Mean over problems of avg@k.
double avg_at_k(const ResponseMatrix& m, std::size_t k);

struct SemResult {
  std::size_t k = 0;
  double sem = 0;
  /// Fewer than two problems: sem is 0 by convention.
  bool degenerate = false;
};

/// Clustered standard error of benchmark avg@k: sqrt(sample variance of the
/// per-problem avg@k / number of problems).
std::vector<SemResult> sem_of_avg(const std::vector<Outcomes>& rows, const std::vector<std::size_t>& ks);

/// Topic tags per problem id (many-to-many).
using TopicMap = std::map<std::string, std::vector<std::string>>;

/// Reads JSONL records {problem_id, topics:[...]}.
TopicMap load_topics(const std::filesystem::path& path);

struct ProblemAccuracy {
  std::string problem_id;
  double accuracy = 0;
  std::size_t successes = 0;
  std::size_t n = 0;
  /// Closed-form pass@k for the k values attached with add_pass_at_k.
  std::map<std::size_t, double> pass_at_k;
};

struct TopicAccuracy {
  std::string topic;
  double accuracy = 0;
  std::size_t problems = 0;
};

struct NewlySolved {
  std::size_t count = 0;
  std::vector<std::string> problem_ids;
  /// Ids of B that A does not contain (not counted).
  std::vector<std::string> missing_in_a;
};

struct SolveRateReport {
  /// Ascending by accuracy, ties by id.
  std::vector<ProblemAccuracy> problems;
  /// Ascending by topic name.
  std::vector<TopicAccuracy> topics;
  std::optional<NewlySolved> newly_solved;
};

/// Per-problem avg@n and per-topic means. Throws EvalError(UnknownProblemId)
/// when the topic map names a problem outside the matrix.
SolveRateReport solve_rate_report(const ResponseMatrix& m, const TopicMap& topics = {});

/// Attaches per-problem closed-form pass@k for every k that fits the row.
void add_pass_at_k(SolveRateReport& r, const std::vector<std::size_t>& ks);

/// Problems with no success in A and at least one in B, matched by id.
NewlySolved newly_solved(const ResponseMatrix& a, const ResponseMatrix& b);

}  // namespace rlvr::eval
