#include "rlvr/eval/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

namespace rlvr::eval {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << std::setprecision(10);
  return out;
}

// Quotes a CSV field when needed.
std::string csv(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + '"';
}

std::string xml_escape(const std::string& s) {
  std::string o;
  for (char c : s) {
    switch (c) {
      case '&': o += "&amp;"; break;
      case '<': o += "&lt;"; break;
      case '>': o += "&gt;"; break;
      case '"': o += "&quot;"; break;
      default: o += c;
    }
  }
  return o;
}

struct Frame {
  double w = 640, h = 400, left = 60, right = 20, top = 40, bottom = 50;
  double px(double fx) const { return left + fx * (w - left - right); }
  double py(double fy) const { return h - bottom - fy * (h - top - bottom); }
};

void svg_axes(std::ostream& o, const Frame& f, const std::string& title, const std::string& xlabel,
              const std::string& ylabel) {
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << f.w << "\" height=\"" << f.h << "\" viewBox=\"0 0 "
    << f.w << ' ' << f.h << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << f.w / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << xml_escape(title)
    << "</text>\n";
  o << "<line x1=\"" << f.px(0) << "\" y1=\"" << f.py(0) << "\" x2=\"" << f.px(1) << "\" y2=\"" << f.py(0)
    << "\" stroke=\"black\"/>\n";
  o << "<line x1=\"" << f.px(0) << "\" y1=\"" << f.py(0) << "\" x2=\"" << f.px(0) << "\" y2=\"" << f.py(1)
    << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double v = i / 4.0;
    o << "<line x1=\"" << f.px(0) - 4 << "\" y1=\"" << f.py(v) << "\" x2=\"" << f.px(1) << "\" y2=\"" << f.py(v)
      << "\" stroke=\"#ddd\"/>\n";
    o << "<text x=\"" << f.px(0) - 8 << "\" y=\"" << f.py(v) + 4 << "\" text-anchor=\"end\">" << v << "</text>\n";
  }
  o << "<text x=\"" << f.w / 2 << "\" y=\"" << f.h - 12 << "\" text-anchor=\"middle\">" << xml_escape(xlabel)
    << "</text>\n";
  o << "<text x=\"16\" y=\"" << f.h / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " << f.h / 2
    << ")\">" << xml_escape(ylabel) << "</text>\n";
}

}  // namespace

std::vector<KRow> k_table(const ResponseMatrix& m, const std::vector<std::size_t>& ks, std::size_t runs,
                          std::uint64_t seed) {
  std::vector<KRow> out;
  for (std::size_t k : ks) {
    KRow r;
    r.k = k;
    r.runs = runs;
    try {
      r.avg = avg_at_k(m, k);
      const auto sem = sem_of_avg(m.outcomes, {k}).front();
      r.avg_sem = sem.sem;
      r.sem_degenerate = sem.degenerate;
      r.pass_closed = pass_at_k_closed(m, k).estimate;
      const auto rs = pass_at_k_resampled(m, k, runs, seed);
      r.pass_resampled = rs.estimate;
      r.pass_resampled_sem = rs.sem;
    } catch (const EvalError& e) {
      r.error = e.what();
    }
    out.push_back(r);
  }
  return out;
}

json k_row_to_json(const KRow& r) {
  if (r.error) return {{"k", r.k}, {"error", *r.error}};
  return {{"k", r.k},
          {"avg_at_k", r.avg},
          {"sem", r.avg_sem},
          {"sem_degenerate", r.sem_degenerate},
          {"pass_at_k_closed", r.pass_closed},
          {"pass_at_k_resampled", r.pass_resampled},
          {"pass_at_k_resampled_sem", r.pass_resampled_sem},
          {"runs", r.runs}};
}

json problem_to_json(const ProblemAccuracy& p) {
  json j{{"problem_id", p.problem_id}, {"accuracy", p.accuracy}, {"successes", p.successes}, {"n", p.n}};
  if (!p.pass_at_k.empty()) {
    json k = json::object();
    for (const auto& [kk, v] : p.pass_at_k) k[std::to_string(kk)] = v;
    j["pass_at_k_closed"] = k;
  }
  return j;
}

json solve_rate_to_json(const SolveRateReport& r) {
  json problems = json::array(), topics = json::array();
  for (const auto& p : r.problems) problems.push_back(problem_to_json(p));
  for (const auto& t : r.topics) topics.push_back({{"topic", t.topic}, {"accuracy", t.accuracy}, {"problems", t.problems}});
  json j{{"problems", problems}, {"topics", topics}};
  if (r.newly_solved)
    j["newly_solved"] = {{"count", r.newly_solved->count},
                         {"problem_ids", r.newly_solved->problem_ids},
                         {"missing_in_a", r.newly_solved->missing_in_a}};
  return j;
}

void write_k_table_csv(const std::filesystem::path& path, const std::vector<KRow>& rows) {
  auto o = open_out(path);
  o << "k,avg_at_k,sem,pass_at_k_closed,pass_at_k_resampled,pass_at_k_resampled_sem,runs,error\n";
  for (const auto& r : rows) {
    if (r.error) {
      o << r.k << ",,,,,,," << csv(*r.error) << '\n';
      continue;
    }
    o << r.k << ',' << r.avg << ',' << r.avg_sem << ',' << r.pass_closed << ',' << r.pass_resampled << ','
      << r.pass_resampled_sem << ',' << r.runs << ",\n";
  }
}

void write_problems_csv(const std::filesystem::path& path, const SolveRateReport& r) {
  auto o = open_out(path);
  std::set<std::size_t> ks;
  for (const auto& p : r.problems)
    for (const auto& kv : p.pass_at_k) ks.insert(kv.first);
  o << "problem_id,accuracy,successes,n";
  for (std::size_t k : ks) o << ",pass_at_" << k;
  o << '\n';
  for (const auto& p : r.problems) {
    o << csv(p.problem_id) << ',' << p.accuracy << ',' << p.successes << ',' << p.n;
    for (std::size_t k : ks) {
      o << ',';
      if (auto it = p.pass_at_k.find(k); it != p.pass_at_k.end()) o << it->second;
    }
    o << '\n';
  }
}

void write_topics_csv(const std::filesystem::path& path, const SolveRateReport& r) {
  auto o = open_out(path);
  o << "topic,accuracy,problems\n";
  for (const auto& t : r.topics) o << csv(t.topic) << ',' << t.accuracy << ',' << t.problems << '\n';
}

void write_solve_rate_svg(const std::filesystem::path& path, const SolveRateReport& r, const std::string& title) {
  auto o = open_out(path);
  Frame f;
  svg_axes(o, f, title, "problems (ascending accuracy)", "accuracy");
  const std::size_t n = r.problems.size();
  if (n > 0) {
    const double bw = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double x0 = f.px(static_cast<double>(i) * bw), x1 = f.px(static_cast<double>(i + 1) * bw);
      const double y = f.py(r.problems[i].accuracy);
      o << "<rect x=\"" << x0 << "\" y=\"" << y << "\" width=\"" << std::max(0.5, x1 - x0 - 0.5) << "\" height=\""
        << f.py(0) - y << "\" fill=\"#4a7ebb\"><title>" << xml_escape(r.problems[i].problem_id) << ' '
        << r.problems[i].accuracy << "</title></rect>\n";
    }
  }
  o << "</svg>\n";
}

void write_pass_at_k_svg(const std::filesystem::path& path, const std::vector<KRow>& rows, const std::string& title) {
  auto o = open_out(path);
  Frame f;
  svg_axes(o, f, title, "k (log2)", "pass@k");
  std::vector<const KRow*> ok;
  for (const auto& r : rows)
    if (!r.error) ok.push_back(&r);
  std::sort(ok.begin(), ok.end(), [](const KRow* a, const KRow* b) { return a->k < b->k; });
  if (!ok.empty()) {
    const double lo = std::log2(static_cast<double>(ok.front()->k)), hi = std::log2(static_cast<double>(ok.back()->k));
    auto fx = [&](std::size_t k) { return hi > lo ? (std::log2(static_cast<double>(k)) - lo) / (hi - lo) : 0.5; };
    for (const auto* r : ok)
      o << "<text x=\"" << f.px(fx(r->k)) << "\" y=\"" << f.py(0) + 16 << "\" text-anchor=\"middle\">" << r->k
        << "</text>\n";
    auto line = [&](auto value, const char* color, const char* dash) {
      std::ostringstream pts;
      pts << std::setprecision(8);
      for (const auto* r : ok) pts << f.px(fx(r->k)) << ',' << f.py(value(*r)) << ' ';
      o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" stroke-dasharray=\"" << dash
        << "\" points=\"" << pts.str() << "\"/>\n";
    };
    line([](const KRow& r) { return r.pass_closed; }, "#4a7ebb", "none");
    line([](const KRow& r) { return r.pass_resampled; }, "#d0593c", "5,3");
    line([](const KRow& r) { return r.avg; }, "#777", "2,2");
    const double lx = f.px(0.02), ly = f.top + 8;
    const char* names[] = {"closed form", "resampled", "avg@k"};
    const char* colors[] = {"#4a7ebb", "#d0593c", "#777"};
    for (int i = 0; i < 3; ++i)
      o << "<text x=\"" << lx << "\" y=\"" << ly + 14 * i << "\" fill=\"" << colors[i] << "\">" << names[i]
        << "</text>\n";
  }
  o << "</svg>\n";
}

}  // namespace rlvr::eval
