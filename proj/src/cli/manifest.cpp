#include "rlvr/cli/manifest.hpp"

#include <openssl/evp.h>

#include <array>
#include <ctime>
#include <fstream>
#include <stdexcept>

namespace rlvr::cli {

namespace {

std::string to_hex(const unsigned char* d, unsigned n) {
  static const char* digits = "0123456789abcdef";
  std::string s;
  for (unsigned i = 0; i < n; ++i) {
    s += digits[d[i] >> 4];
    s += digits[d[i] & 15];
  }
  return s;
}

struct Ctx {
  EVP_MD_CTX* p = EVP_MD_CTX_new();
  ~Ctx() { EVP_MD_CTX_free(p); }
};

}  // namespace

std::string sha256_hex(std::string_view bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> out{};
  unsigned n = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), out.data(), &n, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 failed");
  return to_hex(out.data(), n);
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  Ctx ctx;
  if (!ctx.p || EVP_DigestInit_ex(ctx.p, EVP_sha256(), nullptr) != 1) throw std::runtime_error("sha256 init failed");
  std::array<char, 1 << 16> buf;
  while (in) {
    in.read(buf.data(), buf.size());
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.p, buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> out{};
  unsigned n = 0;
  EVP_DigestFinal_ex(ctx.p, out.data(), &n);
  return to_hex(out.data(), n);
}

std::string utc_timestamp() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json manifest_to_json(const RunManifest& m) {
  auto files = [](const std::map<std::string, std::filesystem::path>& f) {
    json j = json::object();
    for (const auto& [name, path] : f) {
      json e{{"path", path.string()}};
      std::error_code ec;
      if (std::filesystem::is_regular_file(path, ec)) e["sha256"] = sha256_file(path);
      j[name] = e;
    }
    return j;
  };
  json j{{"command", m.command},
         {"tool_version", RLVR_VERSION},
         {"config", m.config},
         {"config_hash", m.config_hash()},
         {"master_seed", m.master_seed},
         {"started_at", m.started_at},
         {"finished_at", m.finished_at},
         {"inputs", files(m.inputs)},
         {"artifacts", files(m.artifacts)},
         {"exit_code", m.exit_code}};
  if (m.error) j["error"] = *m.error;
  if (!m.extra.empty()) j["extra"] = m.extra;
  return j;
}

void write_manifest(const RunManifest& m, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << manifest_to_json(m).dump(2) << '\n';
}

}  // namespace rlvr::cli
