#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rlvr/common/config.hpp"
#include "rlvr/curation/dedup.hpp"
#include "rlvr/curation/difficulty.hpp"
#include "rlvr/curation/filters.hpp"
#include "rlvr/curation/rules.hpp"

namespace rlvr::curation {

struct CurationConfig {
  Domain domain = Domain::Math;
  std::uint64_t seed = 0;

  bool contamination = true;
  std::size_t ngram_n = 9;  // 14 for code unless set

  bool rules = true;  // math only
  RuleConfig rule_config;

  bool dedup = true;
  DedupConfig dedup_config;

  bool difficulty = false;
  std::size_t attempts = 8;
  std::size_t solver_concurrency = 4;
  std::string solver_mode = "stub";  // "stub" or "http"
  std::string solver_script;         // stub responses (JSONL)
  HttpSolverConfig http;
  bool require_majority = false;  // math: keep majority-solvable prompts only
  bool exclude_unsolved = false;  // code: drop score-8 prompts
  std::optional<Fraction> pass_rate_max;

  bool length_filter = false;
  LengthFilterConfig length;
};

/// Parses the pipeline config. Unknown keys at any level raise ConfigError. The
/// n-gram size and majority/unsolved rules default by domain.
CurationConfig curation_config_from_json(const json& j);
json curation_config_to_json(const CurationConfig& c);

struct Drop {
  std::string id;
  std::string stage;  // contamination, rules, dedup, difficulty, pass_rate, length
  std::string rule;
  json detail = json::object();
};

struct CurationResult {
  std::vector<PromptRecord> kept;
  std::vector<Drop> dropped;  // in pipeline order
  std::vector<MergeCluster> clusters;
  std::vector<DifficultyReport> reports;
};

/// Contamination, rule filters, dedup, then (optionally) difficulty scoring with
/// pass-rate and length filtering. `solver` and `verify` are required only when
/// difficulty scoring is enabled. SolverUnavailable propagates and no result is
/// produced.
CurationResult run_curation(const std::vector<PromptRecord>& corpus,
                            const std::vector<std::string>& benchmark_texts,
                            const CurationConfig& cfg, SolverOracle* solver = nullptr,
                            const RecordVerifier& verify = verify_math_record);

json drop_to_json(const Drop& d);
json cluster_to_json(const MergeCluster& c);

}  // namespace rlvr::curation
