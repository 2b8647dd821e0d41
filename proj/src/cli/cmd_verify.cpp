#include <chrono>
#include <map>
#include <ostream>
#include <set>

#include "commands.hpp"
#include "rlvr/code/judge.hpp"
#include "rlvr/code/problem.hpp"
#include "rlvr/math/verify.hpp"

namespace rlvr::cli {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

json throughput(std::size_t n, double seconds) {
  json j{{"wall_seconds", seconds}};
  j["seconds_per_1024"] = n ? json(seconds * 1024.0 / static_cast<double>(n)) : json(nullptr);
  return j;
}

std::string record_id(const json& rec, const std::string& field, const JsonlReader& in) {
  auto it = rec.find(field);
  if (it == rec.end()) return "line:" + std::to_string(in.line());
  if (it->is_string()) return it->get<std::string>();
  if (it->is_number_integer()) return std::to_string(it->get<long long>());
  throw InputError(in.source(), in.line(), "field '" + field + "' must be a string or integer");
}

}  // namespace

json load_config_file(const GlobalOptions& g) {
  if (!g.config) return json::object();
  std::ifstream in(*g.config);
  if (!in) throw ConfigError("cannot read config " + g.config->string());
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw ConfigError(g.config->string() + ": not a JSON object");
  return j;
}

void cmd_verify_math(const GlobalOptions& g, const VerifyMathOptions& o, RunManifest& m, std::ostream& out) {
  m.config = {{"id_field", o.id_field},
              {"response_field", o.response_field},
              {"oracle_field", o.oracle_field},
              {"tol", o.tol},
              {"strict_terminator", o.strict_terminator}};
  m.inputs["in"] = o.in;
  if (!(o.tol > 0)) throw ConfigError("--tol must be positive");
  math::MathVerifyOptions opts;
  opts.tolerance.relative = o.tol;
  opts.policy = o.strict_terminator ? TerminatorPolicy::Strict : TerminatorPolicy::ScanWholeText;

  const auto verdict_path = g.out_dir / "verdicts.jsonl";
  m.artifacts["verdicts"] = verdict_path;
  JsonlReader in(o.in);
  JsonlWriter w(verdict_path);
  const std::size_t chunk = 256 * std::max<std::size_t>(1, g.workers);
  std::vector<math::MathJob> jobs;
  std::map<std::string, std::size_t> reasons;
  std::size_t total = 0, rewarded = 0;
  const auto t0 = Clock::now();
  auto flush = [&] {
    const auto verdicts = math::verify_math_batch(jobs, g.workers, opts);
    for (std::size_t i = 0; i < jobs.size(); ++i) {
      const auto& v = verdicts[i];
      w.write({{"id", jobs[i].id}, {"reward", v.reward}, {"reason", math::reason_name(v.reason)}});
      ++reasons[math::reason_name(v.reason)];
      rewarded += static_cast<std::size_t>(v.reward);
    }
    total += jobs.size();
    jobs.clear();
  };
  while (auto rec = in.next()) {
    math::MathJob job;
    job.id = record_id(*rec, o.id_field, in);
    job.response = require_string(*rec, o.response_field.c_str(), in);
    job.oracle = require_string(*rec, o.oracle_field.c_str(), in);
    jobs.push_back(std::move(job));
    if (jobs.size() == chunk) flush();
  }
  flush();
  w.flush();
  const double secs = seconds_since(t0);

  json summary{{"records", total}, {"rewarded", rewarded}, {"reasons", reasons}};
  summary["reward_rate"] = total ? json(static_cast<double>(rewarded) / static_cast<double>(total)) : json(nullptr);
  summary.update(throughput(total, secs));
  const auto summary_path = g.out_dir / "summary.json";
  std::ofstream(summary_path) << summary.dump(2) << '\n';
  m.artifacts["summary"] = summary_path;
  m.extra["summary"] = summary;
  out << summary.dump(2) << '\n';
}

void cmd_verify_code(const GlobalOptions& g, const VerifyCodeOptions& o, RunManifest& m, std::ostream& out) {
  m.config = {{"runner", o.runner}, {"max_retries", o.max_retries}, {"strict_terminator", o.strict_terminator}};
  m.config["time_limit_ms"] = o.time_limit_ms ? json(*o.time_limit_ms) : json(nullptr);
  m.inputs["problems"] = o.problems;
  m.inputs["responses"] = o.responses;
  if (o.time_limit_ms && *o.time_limit_ms <= 0) throw ConfigError("--time-limit-ms must be positive");
  if (o.max_retries < 0) throw ConfigError("--max-retries must be >= 0");
  if (o.runner.find("{file}") == std::string::npos) throw ConfigError("--runner must contain {file}");

  const auto problems = code::load_problems(o.problems);
  std::map<std::string, const code::CodeProblem*> by_id;
  for (const auto& p : problems) by_id[p.id] = &p;

  // Every problem id must resolve before anything runs.
  {
    JsonlReader in(o.responses);
    while (auto rec = in.next()) {
      const auto pid = require_string(*rec, "problem_id", in);
      require_string(*rec, "response", in);
      if (!by_id.count(pid)) throw InputError(in.source(), in.line(), "unknown problem_id " + pid);
    }
  }

  code::JudgeOptions opts;
  opts.runner = o.runner;
  opts.policy = o.strict_terminator ? TerminatorPolicy::Strict : TerminatorPolicy::ScanWholeText;
  if (o.time_limit_ms) opts.time_limit_override = std::chrono::milliseconds(*o.time_limit_ms);

  const auto verdict_path = g.out_dir / "verdicts.jsonl";
  m.artifacts["verdicts"] = verdict_path;
  JsonlWriter w(verdict_path);
  JsonlReader in(o.responses);
  const std::size_t chunk = 16 * std::max<std::size_t>(1, g.workers);
  std::vector<std::string> ids, responses, pids;
  std::map<std::string, std::size_t> taxonomy, case_verdicts;
  std::size_t total = 0, passed = 0, unresolved = 0, retried = 0;
  const auto t0 = Clock::now();
  auto flush = [&] {
    std::vector<code::CodeJob> jobs;
    for (std::size_t i = 0; i < responses.size(); ++i) jobs.push_back({responses[i], by_id.at(pids[i])});
    const auto res = code::verify_batch(jobs, g.workers, opts, o.max_retries);
    retried += res.retries.size();
    for (std::size_t i = 0; i < jobs.size(); ++i) {
      json rec{{"id", ids[i]}, {"problem_id", pids[i]}};
      std::string outcome;
      if (!res.verdicts[i]) {
        outcome = "SANDBOX_FAILURE";
        rec["reward"] = nullptr;
        ++unresolved;
      } else {
        const auto& v = *res.verdicts[i];
        rec["reward"] = v.reward;
        json cases = json::array();
        for (auto c : v.per_case) {
          cases.push_back(code::case_verdict_name(c));
          ++case_verdicts[code::case_verdict_name(c)];
        }
        rec["per_case"] = cases;
        rec["first_failure"] = v.first_failure ? json(*v.first_failure) : json(nullptr);
        if (v.reward == 1) outcome = "PASS";
        else if (v.per_case.empty()) outcome = "NO_CODE";
        else outcome = code::case_verdict_name(v.per_case[v.first_failure.value_or(v.per_case.size() - 1)]);
        passed += static_cast<std::size_t>(v.reward);
      }
      rec["outcome"] = outcome;
      ++taxonomy[outcome];
      w.write(rec);
    }
    total += jobs.size();
    ids.clear();
    responses.clear();
    pids.clear();
  };
  while (auto rec = in.next()) {
    ids.push_back(record_id(*rec, "id", in));
    pids.push_back(rec->at("problem_id").get<std::string>());
    responses.push_back(rec->at("response").get<std::string>());
    if (responses.size() == chunk) flush();
  }
  flush();
  w.flush();
  const double secs = seconds_since(t0);

  json summary{{"jobs", total}, {"passed", passed}, {"taxonomy", taxonomy}, {"case_verdicts", case_verdicts},
               {"retried_jobs", retried}, {"unresolved_jobs", unresolved}};
  const std::size_t judged = total - unresolved;
  summary["pass_rate"] = judged ? json(static_cast<double>(passed) / static_cast<double>(judged)) : json(nullptr);
  summary.update(throughput(total, secs));
  const auto summary_path = g.out_dir / "summary.json";
  std::ofstream(summary_path) << summary.dump(2) << '\n';
  m.artifacts["summary"] = summary_path;
  m.extra["summary"] = summary;
  out << summary.dump(2) << '\n';
  if (unresolved > 0)
    throw InfrastructureError(std::to_string(unresolved) + " job(s) got no verdict after sandbox retries");
}

}  // namespace rlvr::cli
