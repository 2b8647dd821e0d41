#include "rlvr/curation/difficulty.hpp"

#include "rlvr/code/prompts.hpp"
#include "rlvr/common/parallel.hpp"
#include "rlvr/curation/tokenizer.hpp"
#include "rlvr/math/verify.hpp"

namespace rlvr::curation {

namespace {

SolverResponse response_from_json(const json& j, const JsonlReader& src) {
  if (j.is_string()) return {j.get<std::string>(), std::nullopt};
  if (!j.is_object()) throw InputError(src.source(), src.line(), "response must be string or object");
  SolverResponse r{require_string(j, "text", src), std::nullopt};
  if (auto it = j.find("tokens"); it != j.end()) {
    if (!it->is_number_unsigned()) throw InputError(src.source(), src.line(), "\"tokens\" must be a non-negative integer");
    r.tokens = it->get<std::size_t>();
  }
  return r;
}

}  // namespace

ScriptedSolver::ScriptedSolver(const std::filesystem::path& path) {
  JsonlReader in(path);
  while (auto j = in.next()) {
    const std::string id = require_string(*j, "id", in);
    const json& arr = require_field(*j, "responses", in);
    if (!arr.is_array() || arr.empty())
      throw InputError(in.source(), in.line(), "\"responses\" must be a non-empty array");
    std::vector<SolverResponse> rs;
    for (const json& r : arr) rs.push_back(response_from_json(r, in));
    if (script_.count(id)) throw InputError(in.source(), in.line(), "duplicate id \"" + id + "\"");
    script_[id] = std::move(rs);
  }
}

void ScriptedSolver::add(const std::string& id, std::vector<SolverResponse> responses) {
  script_[id] = std::move(responses);
}

SolverResponse ScriptedSolver::solve(const PromptRecord& prompt, std::size_t attempt) {
  auto it = script_.find(prompt.id);
  if (it == script_.end() || it->second.empty())
    throw SolverUnavailable("scripted solver has no responses for \"" + prompt.id + "\"");
  return it->second[attempt % it->second.size()];
}

std::string solver_prompt(const PromptRecord& prompt) {
  if (prompt.domain == Domain::Math) return prompt.question + "\n\n" + std::string(code::kMathInstruction);
  return prompt.question + "\n\n" + std::string(code::kCodeInstructionNoStarter);
}

int verify_math_record(const PromptRecord& r, std::string_view response) {
  return math::verify_math(response, r.oracle).reward;
}

int difficulty_score(std::size_t attempts, std::size_t passes) {
  if (attempts == 0) return 8;
  const std::size_t failed = attempts - std::min(passes, attempts);
  if (attempts == 8) return static_cast<int>(failed);
  return static_cast<int>((16 * failed + attempts) / (2 * attempts));
}

bool majority_solvable(const DifficultyReport& r) {
  return 2 * r.passes >= r.attempts;
}

DifficultyReport score_difficulty(const PromptRecord& prompt, SolverOracle& solver,
                                  std::size_t attempts, const RecordVerifier& verify) {
  DifficultyReport rep;
  rep.prompt_id = prompt.id;
  rep.attempts = attempts;
  for (std::size_t a = 0; a < attempts; ++a) {
    const SolverResponse resp = solver.solve(prompt, a);
    if (verify(prompt, resp.text) == 1) ++rep.passes;
    rep.response_token_lengths.push_back(resp.tokens ? *resp.tokens : tokenize(resp.text).size());
  }
  rep.score = difficulty_score(rep.attempts, rep.passes);
  return rep;
}

std::vector<DifficultyReport> score_difficulty_batch(const std::vector<PromptRecord>& prompts,
                                                     SolverOracle& solver, std::size_t attempts,
                                                     const RecordVerifier& verify,
                                                     std::size_t concurrency) {
  std::vector<DifficultyReport> out(prompts.size());
  parallel_for(prompts.size(), concurrency, [&](std::size_t i) {
    out[i] = score_difficulty(prompts[i], solver, attempts, verify);
  });
  return out;
}

json report_to_json(const DifficultyReport& r) {
  return json{{"prompt_id", r.prompt_id},
              {"attempts", r.attempts},
              {"passes", r.passes},
              {"score", r.score},
              {"response_token_lengths", r.response_token_lengths}};
}

DifficultyReport report_from_json(const json& j, const std::string& source, std::size_t line) {
  DifficultyReport r;
  try {
    r.prompt_id = j.at("prompt_id").get<std::string>();
    r.attempts = j.at("attempts").get<std::size_t>();
    r.passes = j.at("passes").get<std::size_t>();
    if (auto it = j.find("response_token_lengths"); it != j.end())
      r.response_token_lengths = it->get<std::vector<std::size_t>>();
  } catch (const json::exception& e) {
    throw InputError(source, line, std::string("bad difficulty report: ") + e.what());
  }
  if (r.passes > r.attempts) throw InputError(source, line, "passes exceeds attempts");
  r.score = difficulty_score(r.attempts, r.passes);
  return r;
}

}  // namespace rlvr::curation
