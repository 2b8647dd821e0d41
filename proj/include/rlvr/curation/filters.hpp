#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "rlvr/common/config.hpp"
#include "rlvr/curation/difficulty.hpp"

namespace rlvr::curation {

/// True iff passes/attempts <= threshold, compared exactly.
bool pass_rate_at_most(const DifficultyReport& r, const Fraction& threshold);

/// Ids whose pass rate is at most `threshold`, in input order.
std::vector<std::string> filter_by_pass_rate(const std::vector<DifficultyReport>& reports,
                                             const Fraction& threshold);

enum class Tier { Easy, Medium, Hard };
/// Pass-rate ceilings for the tiers: 14/16, 10/16, 6/16.
Fraction tier_threshold(Tier t);

struct LengthFilterConfig {
  std::size_t min_tokens = 2000;
  std::size_t band_lo = 2000;
  std::size_t band_hi = 4000;
  double rate = 1.0;
  std::uint64_t seed = 0;
};

enum class LengthDecision { Keep, TooShort, Downsampled };
const char* length_decision_name(LengthDecision d) noexcept;

/// Median of the lengths (mean of the two middle values for even counts); 0 if empty.
double median_length(std::vector<std::size_t> lengths);

/// Drops reports whose median length is below min_tokens; keeps those in
/// [band_lo, band_hi) with probability `rate`. The draw for a prompt depends only on
/// (seed, prompt_id).
LengthDecision length_decision(const DifficultyReport& r, const LengthFilterConfig& cfg);

std::vector<std::string> length_filter_and_downsample(const std::vector<DifficultyReport>& reports,
                                                      const LengthFilterConfig& cfg);

}  // namespace rlvr::curation
