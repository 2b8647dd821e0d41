#include "rlvr/eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "rlvr/common/rng.hpp"

namespace rlvr::eval {

namespace {

void check_k(std::size_t n, std::size_t k) {
  if (k == 0) throw EvalError(EvalErrorCode::Domain, "k must be at least 1");
  if (k > n) throw EvalError(EvalErrorCode::KExceedsN, "k=" + std::to_string(k) + " exceeds n=" + std::to_string(n));
}

// Standard error of a mean of `runs` Bernoulli draws with `hits` successes,
// using (hits + 1) / (runs + 2) as the rate.
double binomial_sem(std::size_t hits, std::size_t runs) {
  const double p = (static_cast<double>(hits) + 1.0) / (static_cast<double>(runs) + 2.0);
  return std::sqrt(p * (1 - p) / static_cast<double>(runs));
}

// Partial Fisher-Yates over indices; true if any of the k drawn is a success.
bool draw_hits(const Outcomes& row, std::size_t k, Rng& rng, std::vector<std::size_t>& idx) {
  idx.resize(row.size());
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + rng.below(row.size() - i);
    std::swap(idx[i], idx[j]);
    if (row[idx[i]]) return true;
  }
  return false;
}

}  // namespace

const char* eval_error_name(EvalErrorCode c) noexcept {
  switch (c) {
    case EvalErrorCode::KExceedsN: return "K_EXCEEDS_N";
    case EvalErrorCode::Domain: return "DOMAIN_ERROR";
    case EvalErrorCode::UnknownProblemId: return "UNKNOWN_PROBLEM_ID";
  }
  return "?";
}

std::optional<std::size_t> ResponseMatrix::n() const {
  if (outcomes.empty()) return std::nullopt;
  for (const auto& r : outcomes)
    if (r.size() != outcomes.front().size()) return std::nullopt;
  return outcomes.front().size();
}

std::size_t ResponseMatrix::index_of(const std::string& id) const {
  auto it = std::find(problem_ids.begin(), problem_ids.end(), id);
  if (it == problem_ids.end()) throw EvalError(EvalErrorCode::UnknownProblemId, id);
  return static_cast<std::size_t>(it - problem_ids.begin());
}

ResponseMatrix load_matrix(const std::filesystem::path& path, bool allow_ragged) {
  JsonlReader in(path);
  ResponseMatrix m;
  std::set<std::string> seen;
  while (auto rec = in.next()) {
    if (!rec->is_object()) throw InputError(in.source(), in.line(), "expected an object");
    const std::string id = require_string(*rec, "problem_id", in);
    const json& out = require_field(*rec, "outcomes", in);
    if (!out.is_array() || out.empty()) throw InputError(in.source(), in.line(), "outcomes must be a non-empty array");
    Outcomes row;
    for (const auto& v : out) {
      if (v.is_boolean()) row.push_back(v.get<bool>() ? 1 : 0);
      else if (v.is_number_integer() && (v.get<long long>() == 0 || v.get<long long>() == 1))
        row.push_back(static_cast<std::uint8_t>(v.get<long long>()));
      else throw InputError(in.source(), in.line(), "outcomes must be 0 or 1");
    }
    if (!seen.insert(id).second) throw InputError(in.source(), in.line(), "duplicate problem_id " + id);
    if (!allow_ragged && !m.outcomes.empty() && row.size() != m.outcomes.front().size())
      throw InputError(in.source(), in.line(),
                       "row has n=" + std::to_string(row.size()) + ", expected " +
                           std::to_string(m.outcomes.front().size()));
    if (m.problem_ids.empty())
      if (auto p = rec->find("params"); p != rec->end() && p->is_object()) m.params = *p;
    m.problem_ids.push_back(id);
    m.outcomes.push_back(std::move(row));
  }
  return m;
}

std::size_t successes(const Outcomes& row) {
  return static_cast<std::size_t>(std::count(row.begin(), row.end(), std::uint8_t{1}));
}

double avg_at_k(const Outcomes& row, std::size_t k) {
  check_k(row.size(), k);
  return static_cast<double>(std::count(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(k), std::uint8_t{1})) /
         static_cast<double>(k);
}

double pass_at_k_closed(std::size_t n, std::size_t c, std::size_t k) {
  if (c > n) throw EvalError(EvalErrorCode::Domain, "c exceeds n");
  check_k(n, k);
  if (n - c < k) return 1.0;
  double fail = 1.0;
  for (std::size_t i = n - c + 1; i <= n; ++i) fail *= 1.0 - static_cast<double>(k) / static_cast<double>(i);
  return 1.0 - fail;
}

boost::multiprecision::cpp_rational pass_at_k_exact(std::size_t n, std::size_t c, std::size_t k) {
  using boost::multiprecision::cpp_int;
  if (c > n) throw EvalError(EvalErrorCode::Domain, "c exceeds n");
  check_k(n, k);
  auto binom = [](std::size_t a, std::size_t b) {
    if (b > a) return cpp_int(0);
    cpp_int r = 1;
    for (std::size_t i = 1; i <= b; ++i) r = r * (a - b + i) / i;
    return r;
  };
  return 1 - boost::multiprecision::cpp_rational(binom(n - c, k), binom(n, k));
}

PassKReport pass_at_k_resampled(const Outcomes& row, std::size_t k, std::size_t runs, std::uint64_t seed) {
  check_k(row.size(), k);
  if (runs == 0) throw EvalError(EvalErrorCode::Domain, "runs must be at least 1");
  Rng rng(seed);
  std::vector<std::size_t> idx;
  std::size_t hits = 0;
  for (std::size_t r = 0; r < runs; ++r) hits += draw_hits(row, k, rng, idx);
  return {k, static_cast<double>(hits) / static_cast<double>(runs), PassKMethod::Resampled, runs,
          binomial_sem(hits, runs)};
}

PassKReport pass_at_k_resampled(const ResponseMatrix& m, std::size_t k, std::size_t runs, std::uint64_t seed) {
  if (runs == 0) throw EvalError(EvalErrorCode::Domain, "runs must be at least 1");
  if (m.size() == 0) throw EvalError(EvalErrorCode::Domain, "empty matrix");
  for (const auto& row : m.outcomes) check_k(row.size(), k);
  std::vector<double> per_run(runs, 0.0);
  std::vector<std::size_t> idx;
  for (std::size_t p = 0; p < m.size(); ++p) {
    Rng rng(derive_seed(seed, m.problem_ids[p]));
    for (std::size_t r = 0; r < runs; ++r) per_run[r] += draw_hits(m.outcomes[p], k, rng, idx);
  }
  const double P = static_cast<double>(m.size());
  double mean = 0;
  for (auto& v : per_run) mean += (v /= P);
  mean /= static_cast<double>(runs);
  double sem = 0;
  if (runs > 1) {
    double ss = 0;
    for (double v : per_run) ss += (v - mean) * (v - mean);
    sem = std::sqrt(ss / static_cast<double>(runs - 1) / static_cast<double>(runs));
  }
  return {k, mean, PassKMethod::Resampled, runs, sem};
}

PassKReport pass_at_k_closed(const ResponseMatrix& m, std::size_t k) {
  if (m.size() == 0) throw EvalError(EvalErrorCode::Domain, "empty matrix");
  double sum = 0;
  for (const auto& row : m.outcomes) sum += pass_at_k_closed(row.size(), successes(row), k);
  return {k, sum / static_cast<double>(m.size()), PassKMethod::ClosedForm, 0, 0.0};
}

double avg_at_k(const ResponseMatrix& m, std::size_t k) {
  if (m.size() == 0) throw EvalError(EvalErrorCode::Domain, "empty matrix");
  double sum = 0;
  for (const auto& row : m.outcomes) sum += avg_at_k(row, k);
  return sum / static_cast<double>(m.size());
}

std::vector<SemResult> sem_of_avg(const std::vector<Outcomes>& rows, const std::vector<std::size_t>& ks) {
  std::vector<SemResult> out;
  for (std::size_t k : ks) {
    for (const auto& r : rows) check_k(r.size(), k);
    SemResult s{k, 0.0, rows.size() < 2};
    if (!s.degenerate) {
      std::vector<double> means;
      for (const auto& r : rows) means.push_back(avg_at_k(r, k));
      const double P = static_cast<double>(means.size());
      const double mu = std::accumulate(means.begin(), means.end(), 0.0) / P;
      double ss = 0;
      for (double v : means) ss += (v - mu) * (v - mu);
      s.sem = std::sqrt(ss / (P - 1) / P);
    }
    out.push_back(s);
  }
  return out;
}

TopicMap load_topics(const std::filesystem::path& path) {
  JsonlReader in(path);
  TopicMap m;
  while (auto rec = in.next()) {
    if (!rec->is_object()) throw InputError(in.source(), in.line(), "expected an object");
    const std::string id = require_string(*rec, "problem_id", in);
    const json& t = require_field(*rec, "topics", in);
    if (!t.is_array()) throw InputError(in.source(), in.line(), "topics must be an array of strings");
    auto& dst = m[id];
    for (const auto& v : t) {
      if (!v.is_string()) throw InputError(in.source(), in.line(), "topics must be an array of strings");
      if (std::find(dst.begin(), dst.end(), v.get<std::string>()) == dst.end()) dst.push_back(v.get<std::string>());
    }
  }
  return m;
}

SolveRateReport solve_rate_report(const ResponseMatrix& m, const TopicMap& topics) {
  SolveRateReport rep;
  std::map<std::string, std::size_t> row_of;
  for (std::size_t i = 0; i < m.size(); ++i) {
    const auto& row = m.outcomes[i];
    const std::size_t c = successes(row);
    rep.problems.push_back({m.problem_ids[i], static_cast<double>(c) / static_cast<double>(row.size()), c, row.size()});
    row_of[m.problem_ids[i]] = i;
  }
  std::map<std::string, std::pair<double, std::size_t>> acc;
  for (const auto& [id, tags] : topics) {
    auto it = row_of.find(id);
    if (it == row_of.end()) throw EvalError(EvalErrorCode::UnknownProblemId, id);
    for (const auto& t : tags) {
      acc[t].first += rep.problems[it->second].accuracy;
      ++acc[t].second;
    }
  }
  for (const auto& [t, v] : acc) rep.topics.push_back({t, v.first / static_cast<double>(v.second), v.second});
  std::sort(rep.problems.begin(), rep.problems.end(), [](const ProblemAccuracy& a, const ProblemAccuracy& b) {
    return a.accuracy != b.accuracy ? a.accuracy < b.accuracy : a.problem_id < b.problem_id;
  });
  return rep;
}

void add_pass_at_k(SolveRateReport& r, const std::vector<std::size_t>& ks) {
  for (auto& p : r.problems)
    for (std::size_t k : ks)
      if (k >= 1 && k <= p.n) p.pass_at_k[k] = pass_at_k_closed(p.n, p.successes, k);
}

NewlySolved newly_solved(const ResponseMatrix& a, const ResponseMatrix& b) {
  std::map<std::string, std::size_t> in_a;
  for (std::size_t i = 0; i < a.size(); ++i) in_a[a.problem_ids[i]] = successes(a.outcomes[i]);
  NewlySolved ns;
  for (std::size_t i = 0; i < b.size(); ++i) {
    auto it = in_a.find(b.problem_ids[i]);
    if (it == in_a.end()) {
      ns.missing_in_a.push_back(b.problem_ids[i]);
      continue;
    }
    if (it->second == 0 && successes(b.outcomes[i]) > 0) ns.problem_ids.push_back(b.problem_ids[i]);
  }
  std::sort(ns.problem_ids.begin(), ns.problem_ids.end());
  ns.count = ns.problem_ids.size();
  return ns;
}

}  // namespace rlvr::eval
