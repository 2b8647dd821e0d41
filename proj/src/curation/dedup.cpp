#include "rlvr/curation/dedup.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <numeric>
#include <unordered_map>

#include "rlvr/curation/tokenizer.hpp"

namespace rlvr::curation {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

/// Distinct window keys; tokens are alphanumeric so '\x1f' cannot collide.
std::vector<std::string> window_keys(const std::vector<std::string>& toks, std::size_t n) {
  std::vector<std::string> keys;
  auto join = [&](std::size_t b, std::size_t e) {
    std::string k;
    for (std::size_t i = b; i < e; ++i) {
      if (i > b) k += '\x1f';
      k += toks[i];
    }
    return k;
  };
  if (toks.empty()) return keys;
  if (toks.size() < n) {
    keys.push_back(join(0, toks.size()));
    return keys;
  }
  for (std::size_t i = 0; i + n <= toks.size(); ++i) keys.push_back(join(i, i + n));
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  return keys;
}

double ratio(std::size_t shared, std::size_t a, std::size_t b) {
  const std::size_t m = std::min(a, b);
  return m == 0 ? 0.0 : static_cast<double>(shared) / static_cast<double>(m);
}

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a), b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

std::string normalize_url(std::string_view url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string_view::npos) return "";
  const std::string scheme = lower(url.substr(0, scheme_end));
  std::string_view rest = url.substr(scheme_end + 3);
  if (auto hash = rest.find('#'); hash != std::string_view::npos) rest = rest.substr(0, hash);
  const auto path_start = rest.find_first_of("/?");
  std::string host = lower(rest.substr(0, path_start));
  std::string tail(path_start == std::string_view::npos ? "" : rest.substr(path_start));
  if (host.rfind("www.", 0) == 0) host.erase(0, 4);
  if ((scheme == "http" && host.size() > 3 && host.ends_with(":80")) ||
      (scheme == "https" && host.size() > 4 && host.ends_with(":443")))
    host.erase(host.rfind(':'));
  const auto q = tail.find('?');
  std::string path = tail.substr(0, q);
  const std::string query = q == std::string::npos ? "" : tail.substr(q);
  while (!path.empty() && path.back() == '/') path.pop_back();
  return host + path + query;
}

std::string record_url(const PromptRecord& r) {
  if (r.metadata.is_object()) {
    auto it = r.metadata.find("url");
    if (it != r.metadata.end() && it->is_string()) return normalize_url(it->get<std::string>());
  }
  return normalize_url(r.source);
}

double ngram_overlap(std::string_view a, std::string_view b, std::size_t n) {
  const auto ka = window_keys(tokenize(a), n);
  const auto kb = window_keys(tokenize(b), n);
  std::vector<std::string> common;
  std::set_intersection(ka.begin(), ka.end(), kb.begin(), kb.end(), std::back_inserter(common));
  return ratio(common.size(), ka.size(), kb.size());
}

DedupResult dedup(const std::vector<PromptRecord>& records, const DedupConfig& cfg) {
  const std::size_t N = records.size();
  UnionFind uf(N);
  std::vector<std::pair<std::size_t, std::size_t>> url_links, gram_links;

  std::map<std::string, std::size_t> first_by_url;
  for (std::size_t i = 0; i < N; ++i) {
    const std::string u = record_url(records[i]);
    if (u.empty()) continue;
    auto [it, fresh] = first_by_url.emplace(u, i);
    if (!fresh) url_links.emplace_back(it->second, i);
  }

  // Intern window keys to ids, then count shared windows through an inverted index.
  std::unordered_map<std::string, std::uint32_t> gram_id;
  std::vector<std::vector<std::uint32_t>> grams(N);
  for (std::size_t i = 0; i < N; ++i) {
    for (auto& k : window_keys(tokenize(records[i].question), cfg.n)) {
      auto [it, fresh] = gram_id.emplace(std::move(k), static_cast<std::uint32_t>(gram_id.size()));
      grams[i].push_back(it->second);
    }
  }
  std::vector<std::vector<std::size_t>> postings(gram_id.size());
  for (std::size_t i = 0; i < N; ++i)
    for (auto g : grams[i]) postings[g].push_back(i);
  std::unordered_map<std::size_t, std::size_t> shared;
  for (std::size_t i = 0; i < N; ++i) {
    shared.clear();
    for (auto g : grams[i])
      for (std::size_t j : postings[g])
        if (j > i) ++shared[j];
    for (auto [j, s] : shared)
      if (ratio(s, grams[i].size(), grams[j].size()) > cfg.threshold) gram_links.emplace_back(i, j);
  }

  for (auto [a, b] : url_links) uf.unite(a, b);
  for (auto [a, b] : gram_links) uf.unite(a, b);

  std::map<std::size_t, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < N; ++i) members[uf.find(i)].push_back(i);
  std::vector<bool> root_url(N, false), root_gram(N, false);
  for (auto [a, b] : url_links) root_url[uf.find(a)] = true;
  for (auto [a, b] : gram_links) root_gram[uf.find(a)] = true;

  std::vector<bool> survives(N, false);
  DedupResult out;
  for (auto& [root, idx] : members) {
    std::size_t best = idx.front();
    for (std::size_t i : idx)
      if (records[i].id < records[best].id) best = i;
    survives[best] = true;
    if (idx.size() == 1) continue;
    MergeCluster c;
    c.survivor = records[best].id;
    for (std::size_t i : idx)
      if (i != best) c.merged.push_back(records[i].id);
    std::sort(c.merged.begin(), c.merged.end());
    c.by_url = root_url[root];
    c.by_ngram = root_gram[root];
    out.clusters.push_back(std::move(c));
  }
  std::sort(out.clusters.begin(), out.clusters.end(),
            [](const MergeCluster& a, const MergeCluster& b) { return a.survivor < b.survivor; });
  for (std::size_t i = 0; i < N; ++i)
    if (survives[i]) out.kept.push_back(records[i]);
  return out;
}

}  // namespace rlvr::curation
