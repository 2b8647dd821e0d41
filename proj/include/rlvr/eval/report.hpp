#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rlvr/eval/metrics.hpp"

namespace rlvr::eval {

/// All metrics for one requested k, or the error that prevented them.
struct KRow {
  std::size_t k = 0;
  std::optional<std::string> error;
  double avg = 0;
  double avg_sem = 0;
  bool sem_degenerate = false;
  double pass_closed = 0;
  double pass_resampled = 0;
  double pass_resampled_sem = 0;
  std::size_t runs = 0;
};

/// One row per k. K_EXCEEDS_N (any row shorter than k) marks that k only.
std::vector<KRow> k_table(const ResponseMatrix& m, const std::vector<std::size_t>& ks, std::size_t runs,
                          std::uint64_t seed);

json k_row_to_json(const KRow& r);
json problem_to_json(const ProblemAccuracy& p);
json solve_rate_to_json(const SolveRateReport& r);

void write_k_table_csv(const std::filesystem::path& path, const std::vector<KRow>& rows);
void write_problems_csv(const std::filesystem::path& path, const SolveRateReport& r);
void write_topics_csv(const std::filesystem::path& path, const SolveRateReport& r);

/// Static SVG of per-problem accuracy in ascending order.
void write_solve_rate_svg(const std::filesystem::path& path, const SolveRateReport& r, const std::string& title);
/// Static SVG of pass@k (closed form and resampled) against k on a log2 axis.
void write_pass_at_k_svg(const std::filesystem::path& path, const std::vector<KRow>& rows, const std::string& title);

}  // namespace rlvr::eval
