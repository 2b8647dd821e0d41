#include "rlvr/curation/filters.hpp"

#include <algorithm>
#include <stdexcept>

#include "rlvr/common/rng.hpp"

namespace rlvr::curation {

bool pass_rate_at_most(const DifficultyReport& r, const Fraction& threshold) {
  if (r.attempts == 0) throw std::invalid_argument("report \"" + r.prompt_id + "\" has no attempts");
  // passes/attempts <= num/den  <=>  passes*den <= num*attempts
  return static_cast<unsigned __int128>(r.passes) * static_cast<unsigned long long>(threshold.den) <=
         static_cast<unsigned __int128>(threshold.num) * r.attempts;
}

std::vector<std::string> filter_by_pass_rate(const std::vector<DifficultyReport>& reports,
                                             const Fraction& threshold) {
  std::vector<std::string> kept;
  for (const auto& r : reports)
    if (pass_rate_at_most(r, threshold)) kept.push_back(r.prompt_id);
  return kept;
}

Fraction tier_threshold(Tier t) {
  switch (t) {
    case Tier::Easy: return {14, 16};
    case Tier::Medium: return {10, 16};
    case Tier::Hard: return {6, 16};
  }
  return {1, 1};
}

const char* length_decision_name(LengthDecision d) noexcept {
  switch (d) {
    case LengthDecision::Keep: return "keep";
    case LengthDecision::TooShort: return "too_short_response";
    case LengthDecision::Downsampled: return "downsampled";
  }
  return "?";
}

double median_length(std::vector<std::size_t> v) {
  if (v.empty()) return 0.0;
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  const double hi = static_cast<double>(v[mid]);
  if (v.size() % 2 == 1) return hi;
  const double lo = static_cast<double>(*std::max_element(v.begin(), v.begin() + mid));
  return (lo + hi) / 2.0;
}

LengthDecision length_decision(const DifficultyReport& r, const LengthFilterConfig& cfg) {
  const double m = median_length(r.response_token_lengths);
  if (m < static_cast<double>(cfg.min_tokens)) return LengthDecision::TooShort;
  if (m >= static_cast<double>(cfg.band_lo) && m < static_cast<double>(cfg.band_hi)) {
    Rng rng(derive_seed(cfg.seed, r.prompt_id));
    if (!rng.bernoulli(cfg.rate)) return LengthDecision::Downsampled;
  }
  return LengthDecision::Keep;
}

std::vector<std::string> length_filter_and_downsample(const std::vector<DifficultyReport>& reports,
                                                      const LengthFilterConfig& cfg) {
  if (!(cfg.rate >= 0.0 && cfg.rate <= 1.0)) throw std::invalid_argument("rate must lie in [0, 1]");
  std::vector<std::string> kept;
  for (const auto& r : reports)
    if (length_decision(r, cfg) == LengthDecision::Keep) kept.push_back(r.prompt_id);
  return kept;
}

}  // namespace rlvr::curation
