#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace semilab::harness {

std::string sha256_hex(const std::string& data);
/// Throws std::runtime_error when the file cannot be read.
std::string sha256_file(const std::filesystem::path& path);

struct ArtifactRecord {
  std::string path;  ///< relative to the output directory
  std::string sha256;
  std::uintmax_t bytes = 0;
};

/// Output directory with atomic writes (temp file + rename) and a checksum per file.
class ArtifactStore {
 public:
  /// Creates the directory if needed and probes that it accepts files; throws ConfigError
  /// (field "output") otherwise, leaving nothing behind.
  explicit ArtifactStore(std::filesystem::path dir);

  void write(const std::string& name, const std::string& content);
  const std::vector<ArtifactRecord>& records() const { return records_; }
  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
  std::vector<ArtifactRecord> records_;
};

struct StageRecord {
  std::string name;
  double wall_seconds = 0.0;
  std::string status;  ///< pass, fail, numerical-error, config-error
  std::string message;
};

struct RunManifest {
  std::string tool_version;
  std::string config_hash;  ///< SHA-256 of the resolved config record
  std::uint64_t seed = 0;
  std::vector<StageRecord> stages;
  std::vector<ArtifactRecord> files;

  nlohmann::ordered_json to_json() const;
};

/// Re-reads every listed file of manifest.json in `dir` and compares checksums.
bool verify_manifest(const std::filesystem::path& dir, std::string* problem = nullptr);

const char* tool_version();

}  // namespace semilab::harness
