#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <exception>
#include <iostream>
#include <thread>
#include <vector>

#include "criteria.hpp"

using namespace rlvr::acceptance;

namespace {

struct Criterion {
  int id;
  const char* name;
  double limit_s;  // 0: no runtime bound
  Outcome (*run)(const Context&);
};

const Criterion kCriteria[] = {
    {1, "advantage normalization", 10, advantage_normalization},
    {2, "on-policy identity", 0, on_policy_identity},
    {3, "gradient check", 30, gradient_check},
    {4, "entropy-collapse ablation", 300, entropy_collapse},
    {5, "length-extension ablation", 300, length_extension},
    {6, "hard-prompt filtering", 300, hard_prompt_filtering},
    {7, "reward-noise ablations", 600, reward_noise},
    {8, "pass@k closed form and resampling", 60, pass_at_k},
    {9, "sem monotonicity", 0, sem_monotonicity},
    {10, "contamination filter", 0, contamination_filter},
    {11, "math verifier soundness", 0, math_soundness},
    {12, "code judge", 0, code_judge},
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks"};
  Context ctx;
  std::string configs = RLVR_CONFIG_DIR, data = RLVR_TEST_DATA, logs = "acceptance_logs";
  std::vector<int> only;
  ctx.workers = std::max(1u, std::thread::hardware_concurrency());
  app.add_option("--configs", configs, "Reference training configs");
  app.add_option("--data", data, "Golden test data");
  app.add_option("--logs", logs, "Directory for run logs");
  app.add_option("--workers", ctx.workers);
  app.add_option("criteria", only, "Run only these criterion numbers");
  CLI11_PARSE(app, argc, argv);
  ctx.configs = configs;
  ctx.data = data;
  ctx.logs = logs;
  std::filesystem::create_directories(ctx.logs);

  int failed = 0;
  for (const auto& c : kCriteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run(ctx);
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.limit_s > 0 && secs >= c.limit_s) {
      o.pass = false;
      o.detail += " runtime over " + std::to_string(static_cast<int>(c.limit_s)) + "s";
    }
    failed += !o.pass;
    std::printf("[%s] %2d %-34s %7.1fs  %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, secs, o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
