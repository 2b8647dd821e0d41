#include <thread>

#include <httplib.h>

#include "rlvr/curation/difficulty.hpp"

namespace rlvr::curation {

HttpSolver::HttpSolver(HttpSolverConfig cfg) : cfg_(std::move(cfg)) {
  if (cfg_.endpoint.empty()) throw std::invalid_argument("HttpSolver: endpoint is empty");
}

SolverResponse HttpSolver::solve(const PromptRecord& prompt, std::size_t attempt) {
  json body{{"prompt", solver_prompt(prompt)},
            {"max_tokens", cfg_.max_tokens},
            {"temperature", cfg_.temperature},
            {"top_p", cfg_.top_p},
            {"n", 1},
            {"user", prompt.id + "#" + std::to_string(attempt)}};
  if (!cfg_.model.empty()) body["model"] = cfg_.model;
  const std::string payload = body.dump();

  std::string last_error;
  auto delay = cfg_.backoff;
  for (std::size_t tryno = 0; tryno <= cfg_.max_retries; ++tryno) {
    if (tryno > 0) {
      std::this_thread::sleep_for(delay);
      delay *= 2;
    }
    httplib::Client cli(cfg_.endpoint);
    cli.set_connection_timeout(cfg_.timeout);
    cli.set_read_timeout(cfg_.timeout);
    auto res = cli.Post(cfg_.path, payload, "application/json");
    if (!res) {
      last_error = "connection error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status == 429 || res->status >= 500) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200)
      throw SolverUnavailable("solver endpoint returned HTTP " + std::to_string(res->status));
    try {
      const json j = json::parse(res->body);
      SolverResponse out{j.at("choices").at(0).at("text").get<std::string>(), std::nullopt};
      if (auto u = j.find("usage"); u != j.end() && u->contains("completion_tokens"))
        out.tokens = u->at("completion_tokens").get<std::size_t>();
      return out;
    } catch (const json::exception& e) {
      throw SolverUnavailable(std::string("malformed solver response: ") + e.what());
    }
  }
  throw SolverUnavailable("solver endpoint failed after " + std::to_string(cfg_.max_retries + 1) +
                          " attempts: " + last_error);
}

}  // namespace rlvr::curation
