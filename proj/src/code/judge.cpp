#include "rlvr/code/judge.hpp"

#include <mutex>
#include <regex>

#include "rlvr/code/extract.hpp"
#include "rlvr/common/jsonl.hpp"
#include "rlvr/common/parallel.hpp"

namespace rlvr::code {

const char* case_verdict_name(CaseVerdict v) noexcept {
  switch (v) {
    case CaseVerdict::Pass: return "PASS";
    case CaseVerdict::WrongOutput: return "WRONG_OUTPUT";
    case CaseVerdict::RuntimeError: return "RUNTIME_ERROR";
    case CaseVerdict::Timeout: return "TIMEOUT";
  }
  return "?";
}

std::string normalize_output(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    while (!line.empty() && (line.back() == ' ' || line.back() == '\t' || line.back() == '\r' ||
                             line.back() == '\f' || line.back() == '\v'))
      line.remove_suffix(1);
    out.append(line);
    out.push_back('\n');
    pos = nl + 1;
  }
  while (!out.empty() && out.back() == '\n') out.pop_back();
  return out;
}

std::string function_call_driver(const std::string& header) {
  static const std::regex def_re(R"(def\s+([A-Za-z_]\w*)\s*\()");
  static const std::regex class_re(R"(class\s+Solution\b)");
  std::smatch m;
  if (!std::regex_search(header, m, def_re))
    throw SandboxError("starter header declares no function");
  const std::string name = m[1];
  const bool method = std::regex_search(header, class_re);
  std::string d;
  d += "import json, sys\n";
  d += "sys.setrecursionlimit(100000)\n";
  d += "ns = {'__name__': 'solution'}\n";
  d += "exec('from typing import *', ns)\n";
  d += "exec(compile(open('solution.py').read(), 'solution.py', 'exec'), ns)\n";
  d += "args = [json.loads(l) for l in sys.stdin.read().split('\\n') if l.strip()]\n";
  d += method ? "fn = getattr(ns['Solution'](), '" + name + "')\n" : "fn = ns['" + name + "']\n";
  d += "print(json.dumps(fn(*args)))\n";
  return d;
}

namespace {

bool outputs_match(const std::string& actual, const std::string& expected, Format format) {
  const std::string a = normalize_output(actual);
  const std::string e = normalize_output(expected);
  if (a == e) return true;
  if (format != Format::FunctionCall) return false;
  // Return values compare as JSON values, so 1.0 == 1 and spacing is irrelevant.
  const json ja = json::parse(a, nullptr, false);
  const json je = json::parse(e, nullptr, false);
  return !ja.is_discarded() && !je.is_discarded() && ja == je;
}

}  // namespace

CaseVerdict run_case(const std::string& program, const TestCase& tc, Format format,
                     const std::optional<std::string>& starter_header, const JudgeOptions& opts) {
  ScratchDir dir;
  std::string entry = "solution.py";
  dir.write(entry, program);
  if (format == Format::FunctionCall) {
    entry = "driver.py";
    dir.write(entry, function_call_driver(starter_header.value_or("")));
  }
  const auto limit = opts.time_limit_override.value_or(tc.time_limit);
  const ProcessResult r =
      run_process(expand_runner(opts.runner, entry), tc.input, limit, opts.limits, dir.path());
  if (r.timed_out) return CaseVerdict::Timeout;
  if (r.signaled || r.exit_code != 0 || r.output_limit) return CaseVerdict::RuntimeError;
  return outputs_match(r.stdout_data, tc.expected_output, format) ? CaseVerdict::Pass
                                                                  : CaseVerdict::WrongOutput;
}

ExecutionVerdict verify_code(std::string_view response, const CodeProblem& problem,
                             const JudgeOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  ExecutionVerdict v;
  const auto program = extract_code(response, opts.fence_tag, opts.policy);
  if (program) {
    for (std::size_t i = 0; i < problem.tests.size(); ++i) {
      const CaseVerdict c =
          run_case(*program, problem.tests[i], problem.format, problem.starter_header, opts);
      v.per_case.push_back(c);
      if (c != CaseVerdict::Pass && !v.first_failure) {
        v.first_failure = i;
        if (opts.short_circuit) break;
      }
    }
    v.reward = !v.first_failure && !v.per_case.empty() ? 1 : 0;
  }
  v.elapsed = std::chrono::duration_cast<std::chrono::microseconds>(
      std::chrono::steady_clock::now() - t0);
  return v;
}

BatchResult verify_batch(const std::vector<CodeJob>& jobs, std::size_t workers,
                         const JudgeOptions& opts, int max_retries) {
  const auto t0 = std::chrono::steady_clock::now();
  BatchResult out;
  out.verdicts.resize(jobs.size());
  std::mutex mu;
  parallel_for(jobs.size(), workers, [&](std::size_t i) {
    RetryRecord rec{i, 0, false, {}};
    for (int attempt = 0; attempt <= max_retries; ++attempt) {
      try {
        out.verdicts[i] = verify_code(jobs[i].response, *jobs[i].problem, opts);
        rec.resolved = true;
        break;
      } catch (const SandboxError& e) {
        rec.failures = attempt + 1;
        rec.last_error = e.what();
      }
    }
    if (rec.failures > 0) {
      std::lock_guard lock(mu);
      out.retries.push_back(std::move(rec));
    }
  });
  std::sort(out.retries.begin(), out.retries.end(),
            [](const RetryRecord& a, const RetryRecord& b) { return a.job < b.job; });
  out.wall_time = std::chrono::duration_cast<std::chrono::microseconds>(
      std::chrono::steady_clock::now() - t0);
  return out;
}

}  // namespace rlvr::code
