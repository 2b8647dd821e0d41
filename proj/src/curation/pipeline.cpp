#include "rlvr/curation/pipeline.hpp"

#include <set>

#include "rlvr/curation/ngram_index.hpp"

namespace rlvr::curation {

CurationConfig curation_config_from_json(const json& j) {
  check_keys(j, {"domain", "seed", "contamination", "rules", "dedup", "difficulty", "length"},
             "curate");
  CurationConfig c;
  const std::string domain = config_value<std::string>(j, "domain", "math", "curate");
  if (domain == "math") c.domain = Domain::Math;
  else if (domain == "code") c.domain = Domain::Code;
  else throw ConfigError("curate.domain: expected \"math\" or \"code\"");
  c.seed = config_value<std::uint64_t>(j, "seed", 0, "curate");
  c.ngram_n = c.domain == Domain::Math ? 9 : 14;
  c.rules = c.domain == Domain::Math;
  c.require_majority = c.domain == Domain::Math;
  c.exclude_unsolved = c.domain == Domain::Code;

  if (auto it = j.find("contamination"); it != j.end()) {
    const char* ctx = "curate.contamination";
    check_keys(*it, {"enabled", "n"}, ctx);
    c.contamination = config_value(*it, "enabled", c.contamination, ctx);
    c.ngram_n = config_value(*it, "n", c.ngram_n, ctx);
    if (c.ngram_n == 0) throw ConfigError("curate.contamination.n must be >= 1");
  }
  if (auto it = j.find("rules"); it != j.end()) {
    const char* ctx = "curate.rules";
    check_keys(*it, {"enabled", "min_question_tokens", "max_answer_tokens",
                     "max_non_latin_letter_ratio", "disabled"}, ctx);
    auto& r = c.rule_config;
    c.rules = config_value(*it, "enabled", c.rules, ctx);
    r.min_question_tokens = config_value(*it, "min_question_tokens", r.min_question_tokens, ctx);
    r.max_answer_tokens = config_value(*it, "max_answer_tokens", r.max_answer_tokens, ctx);
    r.max_non_latin_letter_ratio =
        config_value(*it, "max_non_latin_letter_ratio", r.max_non_latin_letter_ratio, ctx);
    const auto disabled = config_value(*it, "disabled", std::vector<std::string>{}, ctx);
    std::set<std::string> known;
    for (const auto& rule : math_rules()) known.insert(rule.name);
    for (const auto& d : disabled) {
      if (!known.count(d)) throw ConfigError("curate.rules.disabled: unknown rule \"" + d + "\"");
      r.disabled.insert(d);
    }
  }
  if (auto it = j.find("dedup"); it != j.end()) {
    const char* ctx = "curate.dedup";
    check_keys(*it, {"enabled", "n", "threshold"}, ctx);
    c.dedup = config_value(*it, "enabled", c.dedup, ctx);
    c.dedup_config.n = config_value(*it, "n", c.dedup_config.n, ctx);
    c.dedup_config.threshold = config_value(*it, "threshold", c.dedup_config.threshold, ctx);
    if (c.dedup_config.n == 0) throw ConfigError("curate.dedup.n must be >= 1");
  }
  if (auto it = j.find("difficulty"); it != j.end()) {
    const char* ctx = "curate.difficulty";
    check_keys(*it, {"enabled", "attempts", "concurrency", "solver", "require_majority",
                     "exclude_unsolved", "pass_rate_max"}, ctx);
    c.difficulty = config_value(*it, "enabled", true, ctx);
    c.attempts = config_value(*it, "attempts", c.attempts, ctx);
    if (c.attempts == 0) throw ConfigError("curate.difficulty.attempts must be >= 1");
    c.solver_concurrency = config_value(*it, "concurrency", c.solver_concurrency, ctx);
    c.require_majority = config_value(*it, "require_majority", c.require_majority, ctx);
    c.exclude_unsolved = config_value(*it, "exclude_unsolved", c.exclude_unsolved, ctx);
    if (auto p = it->find("pass_rate_max"); p != it->end() && !p->is_null())
      c.pass_rate_max = parse_fraction(*p, "curate.difficulty.pass_rate_max");
    if (auto s = it->find("solver"); s != it->end()) {
      const char* sctx = "curate.difficulty.solver";
      check_keys(*s, {"mode", "script", "endpoint", "path", "model", "max_tokens", "temperature",
                      "top_p", "max_retries", "backoff_ms", "timeout_s"}, sctx);
      c.solver_mode = config_value<std::string>(*s, "mode", "stub", sctx);
      if (c.solver_mode != "stub" && c.solver_mode != "http")
        throw ConfigError("curate.difficulty.solver.mode: expected \"stub\" or \"http\"");
      c.solver_script = config_value<std::string>(*s, "script", "", sctx);
      auto& h = c.http;
      h.endpoint = config_value(*s, "endpoint", h.endpoint, sctx);
      h.path = config_value(*s, "path", h.path, sctx);
      h.model = config_value(*s, "model", h.model, sctx);
      h.max_tokens = config_value(*s, "max_tokens", h.max_tokens, sctx);
      h.temperature = config_value(*s, "temperature", h.temperature, sctx);
      h.top_p = config_value(*s, "top_p", h.top_p, sctx);
      h.max_retries = config_value(*s, "max_retries", h.max_retries, sctx);
      h.backoff = std::chrono::milliseconds(
          config_value<long long>(*s, "backoff_ms", h.backoff.count(), sctx));
      h.timeout = std::chrono::seconds(config_value<long long>(*s, "timeout_s", h.timeout.count(), sctx));
      if (c.solver_mode == "http" && h.endpoint.empty())
        throw ConfigError("curate.difficulty.solver.endpoint is required in http mode");
    }
  }
  if (auto it = j.find("length"); it != j.end()) {
    const char* ctx = "curate.length";
    check_keys(*it, {"enabled", "min_tokens", "band", "rate"}, ctx);
    c.length_filter = config_value(*it, "enabled", true, ctx);
    c.length.min_tokens = config_value(*it, "min_tokens", c.length.min_tokens, ctx);
    if (auto b = it->find("band"); b != it->end()) {
      const auto band = config_value(*it, "band", std::vector<std::size_t>{}, ctx);
      if (band.size() != 2 || band[0] > band[1])
        throw ConfigError("curate.length.band: expected [lo, hi] with lo <= hi");
      c.length.band_lo = band[0];
      c.length.band_hi = band[1];
    }
    c.length.rate = config_value(*it, "rate", c.length.rate, ctx);
    if (!(c.length.rate >= 0.0 && c.length.rate <= 1.0))
      throw ConfigError("curate.length.rate must lie in [0, 1]");
  }
  c.length.seed = c.seed;
  if (c.length_filter && !c.difficulty)
    throw ConfigError("curate.length requires difficulty scoring (solver response lengths)");
  return c;
}

json curation_config_to_json(const CurationConfig& c) {
  json j{{"domain", c.domain == Domain::Math ? "math" : "code"},
         {"seed", c.seed},
         {"contamination", {{"enabled", c.contamination}, {"n", c.ngram_n}}},
         {"rules",
          {{"enabled", c.rules},
           {"min_question_tokens", c.rule_config.min_question_tokens},
           {"max_answer_tokens", c.rule_config.max_answer_tokens},
           {"max_non_latin_letter_ratio", c.rule_config.max_non_latin_letter_ratio},
           {"disabled", c.rule_config.disabled}}},
         {"dedup",
          {{"enabled", c.dedup}, {"n", c.dedup_config.n}, {"threshold", c.dedup_config.threshold}}}};
  if (c.difficulty) {
    json d{{"enabled", true},
           {"attempts", c.attempts},
           {"concurrency", c.solver_concurrency},
           {"require_majority", c.require_majority},
           {"exclude_unsolved", c.exclude_unsolved},
           {"solver", {{"mode", c.solver_mode}}}};
    if (c.solver_mode == "stub") d["solver"]["script"] = c.solver_script;
    else d["solver"]["endpoint"] = c.http.endpoint, d["solver"]["model"] = c.http.model;
    if (c.pass_rate_max)
      d["pass_rate_max"] =
          std::to_string(c.pass_rate_max->num) + "/" + std::to_string(c.pass_rate_max->den);
    j["difficulty"] = d;
  }
  if (c.length_filter)
    j["length"] = {{"enabled", true},
                   {"min_tokens", c.length.min_tokens},
                   {"band", {c.length.band_lo, c.length.band_hi}},
                   {"rate", c.length.rate}};
  return j;
}

CurationResult run_curation(const std::vector<PromptRecord>& corpus,
                            const std::vector<std::string>& benchmark_texts,
                            const CurationConfig& cfg, SolverOracle* solver,
                            const RecordVerifier& verify) {
  CurationResult res;
  std::vector<PromptRecord> live;

  std::optional<NGramIndex> index;
  if (cfg.contamination && !benchmark_texts.empty()) index.emplace(benchmark_texts, cfg.ngram_n);
  for (const auto& r : corpus) {
    if (index && index->is_contaminated(r.question)) {
      res.dropped.push_back({r.id, "contamination", "contamination", {{"n", cfg.ngram_n}}});
      continue;
    }
    if (cfg.rules && r.domain == Domain::Math) {
      if (auto rule = apply_rule_filters(r, cfg.rule_config)) {
        res.dropped.push_back({r.id, "rules", *rule, json::object()});
        continue;
      }
    }
    live.push_back(r);
  }

  if (cfg.dedup) {
    DedupResult d = dedup(live, cfg.dedup_config);
    for (const auto& c : d.clusters)
      for (const auto& id : c.merged)
        res.dropped.push_back({id, "dedup", "duplicate",
                               {{"survivor", c.survivor}, {"by_url", c.by_url}, {"by_ngram", c.by_ngram}}});
    res.clusters = std::move(d.clusters);
    live = std::move(d.kept);
  }

  if (cfg.difficulty) {
    if (!solver) throw std::invalid_argument("difficulty scoring needs a solver");
    res.reports = score_difficulty_batch(live, *solver, cfg.attempts, verify, cfg.solver_concurrency);
    std::vector<PromptRecord> next;
    for (std::size_t i = 0; i < live.size(); ++i) {
      const auto& rep = res.reports[i];
      const json detail{{"passes", rep.passes}, {"attempts", rep.attempts}, {"score", rep.score}};
      if (cfg.exclude_unsolved && unsolved(rep)) {
        res.dropped.push_back({rep.prompt_id, "difficulty", "unsolved", detail});
      } else if (cfg.require_majority && !majority_solvable(rep)) {
        res.dropped.push_back({rep.prompt_id, "difficulty", "not_majority_solvable", detail});
      } else if (cfg.pass_rate_max && !pass_rate_at_most(rep, *cfg.pass_rate_max)) {
        res.dropped.push_back({rep.prompt_id, "pass_rate", "pass_rate_above_threshold", detail});
      } else if (cfg.length_filter) {
        const LengthDecision ld = length_decision(rep, cfg.length);
        if (ld != LengthDecision::Keep) {
          json d2 = detail;
          d2["median_tokens"] = median_length(rep.response_token_lengths);
          res.dropped.push_back({rep.prompt_id, "length", length_decision_name(ld), d2});
        } else {
          next.push_back(live[i]);
        }
      } else {
        next.push_back(live[i]);
      }
    }
    live = std::move(next);
  }
  res.kept = std::move(live);
  return res;
}

json drop_to_json(const Drop& d) {
  return json{{"id", d.id}, {"stage", d.stage}, {"rule", d.rule}, {"detail", d.detail}};
}

json cluster_to_json(const MergeCluster& c) {
  return json{{"survivor", c.survivor}, {"merged", c.merged}, {"by_url", c.by_url},
              {"by_ngram", c.by_ngram}};
}

}  // namespace rlvr::curation
