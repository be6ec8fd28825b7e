#include "semilab/harness/artifacts.hpp"

#include <openssl/evp.h>

#include <fstream>
#include <iterator>
#include <memory>
#include <sstream>
#include <system_error>

#include "semilab/core/errors.hpp"

#ifndef SEMILAB_VERSION
#define SEMILAB_VERSION "0.0.0"
#endif

namespace semilab::harness {

namespace fs = std::filesystem;

const char* tool_version() { return SEMILAB_VERSION; }

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 || EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1)
    throw std::runtime_error("SHA-256 computation failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 15]);
  }
  return out;
}

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path.string() + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

std::string sha256_file(const fs::path& path) { return sha256_hex(read_file(path)); }

ArtifactStore::ArtifactStore(fs::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  const bool existed = fs::exists(dir_, ec);
  if (existed && !fs::is_directory(dir_, ec))
    throw ConfigError("output", "'" + dir_.string() + "' exists and is not a directory");
  if (!existed && !fs::create_directories(dir_, ec))
    throw ConfigError("output", "cannot create '" + dir_.string() + "': " + ec.message());
  const fs::path probe = dir_ / ".semilab-write-probe";
  bool ok = false;
  {
    std::ofstream out(probe, std::ios::binary);
    ok = static_cast<bool>(out << "probe") && static_cast<bool>(out.flush());
  }
  fs::remove(probe, ec);
  if (!ok) {
    if (!existed) fs::remove(dir_, ec);
    throw ConfigError("output", "directory '" + dir_.string() + "' is not writable");
  }
}

void ArtifactStore::write(const std::string& name, const std::string& content) {
  const fs::path target = dir_ / name;
  const fs::path tmp = dir_ / ("." + name + ".partial");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw std::runtime_error("failed writing '" + target.string() + "'");
    }
  }
  fs::rename(tmp, target);
  ArtifactRecord rec{name, sha256_hex(content), content.size()};
  for (auto& r : records_)
    if (r.path == name) {
      r = rec;
      return;
    }
  records_.push_back(rec);
}

nlohmann::ordered_json RunManifest::to_json() const {
  nlohmann::ordered_json j;
  j["tool_version"] = tool_version;
  j["config_hash"] = config_hash;
  j["seed"] = seed;
  auto& st = j["stages"] = nlohmann::ordered_json::array();
  for (const auto& s : stages)
    st.push_back({{"name", s.name}, {"status", s.status}, {"wall_seconds", s.wall_seconds}, {"message", s.message}});
  auto& fl = j["files"] = nlohmann::ordered_json::array();
  for (const auto& f : files) fl.push_back({{"path", f.path}, {"sha256", f.sha256}, {"bytes", f.bytes}});
  return j;
}

bool verify_manifest(const fs::path& dir, std::string* problem) {
  auto fail = [&](const std::string& msg) {
    if (problem) *problem = msg;
    return false;
  };
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(dir / "manifest.json"));
  } catch (const std::exception& e) {
    return fail(std::string("unreadable manifest: ") + e.what());
  }
  if (!j.contains("files") || !j["files"].is_array()) return fail("manifest has no file list");
  for (const auto& f : j["files"]) {
    const auto path = f.value("path", std::string{});
    std::string content;
    try {
      content = read_file(dir / path);
    } catch (const std::exception&) {
      return fail("missing file '" + path + "'");
    }
    if (content.size() != f.value("bytes", std::uintmax_t{0})) return fail("size mismatch for '" + path + "'");
    if (sha256_hex(content) != f.value("sha256", std::string{})) return fail("checksum mismatch for '" + path + "'");
  }
  return true;
}

}  // namespace semilab::harness
