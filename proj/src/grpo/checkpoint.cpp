#include <charconv>
#include <fstream>
#include <sstream>

#include "rlvr/grpo/policy.hpp"

namespace rlvr::grpo {

namespace {
constexpr const char* kMagic = "rlvr-toy-policy 1";

std::string vocab_line() {
  std::string s = "vocab";
  for (char c : kVocab) (s += ' ') += c;
  return s;
}
}  // namespace

void save_checkpoint(const ToyPolicy<double>& policy, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write checkpoint " + path.string());
  out << kMagic << '\n' << vocab_line() << '\n';
  out << "prompts " << policy.num_prompts() << " max_len " << policy.max_len() << " steps "
      << policy.step_count << '\n';
  char buf[32];
  for (std::size_t q = 0; q < policy.num_prompts(); ++q) {
    out << "prompt " << policy.prompt_ids()[q] << '\n';
    const auto& t = policy.table(q);
    for (int r = 0; r < t.rows(); ++r) {
      for (int v = 0; v < kVocabSize; ++v) {
        auto [end, ec] = std::to_chars(buf, buf + sizeof buf, t(r, v));
        if (v) out << ' ';
        out.write(buf, end - buf);
      }
      out << '\n';
    }
  }
  if (!out) throw std::runtime_error("failed writing checkpoint " + path.string());
}

ToyPolicy<double> load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read checkpoint " + path.string());
  auto fail = [&](const std::string& what) { return std::runtime_error(path.string() + ": " + what); };
  std::string line;
  if (!std::getline(in, line) || line != kMagic) throw fail("not a toy policy checkpoint");
  if (!std::getline(in, line) || line != vocab_line()) throw fail("vocabulary mismatch");
  std::string w1, w2, w3;
  std::size_t n = 0, steps = 0;
  int max_len = 0;
  if (!std::getline(in, line)) throw fail("missing size line");
  std::istringstream hdr(line);
  if (!(hdr >> w1 >> n >> w2 >> max_len >> w3 >> steps) || w1 != "prompts" || w2 != "max_len" || w3 != "steps")
    throw fail("bad size line");
  std::vector<std::string> ids;
  std::vector<ToyPolicy<double>::Table> tables;
  for (std::size_t q = 0; q < n; ++q) {
    if (!std::getline(in, line) || line.rfind("prompt ", 0) != 0) throw fail("missing prompt line");
    ids.push_back(line.substr(7));
    ToyPolicy<double>::Table t(max_len, kVocabSize);
    for (int r = 0; r < max_len; ++r) {
      if (!std::getline(in, line)) throw fail("truncated table for " + ids.back());
      const char* p = line.data();
      const char* end = p + line.size();
      for (int v = 0; v < kVocabSize; ++v) {
        while (p < end && *p == ' ') ++p;
        auto [next, ec] = std::from_chars(p, end, t(r, v));
        if (ec != std::errc()) throw fail("bad number in table for " + ids.back());
        p = next;
      }
    }
    tables.push_back(std::move(t));
  }
  ToyPolicy<double> policy(ids, max_len);
  for (std::size_t q = 0; q < n; ++q) policy.table(q) = tables[q];
  policy.step_count = steps;
  return policy;
}

}  // namespace rlvr::grpo
