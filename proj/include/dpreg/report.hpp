#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace dpreg {

// Key-value run manifest written next to every experiment output so a run can
// be replayed exactly. The config hash is a pure function of the canonicalized
// configuration (sorted keys, normalized numeric formatting); the seed and
// timestamp live outside the hash.
struct RunManifest {
  std::uint64_t seed = 0;
  std::string config_hash;
  std::string artifact_version;
  std::string timestamp;
  double eps_total = 0.0;
  double delta_total = 0.0;
  std::map<std::string, std::string> config;  // canonical key -> value

  std::string to_text() const;
  static RunManifest from_text(const std::string& text);
};

extern const char* kArtifactVersion;

// Formats a double with enough digits to round-trip bit-exactly.
std::string format_double(double v);

// Canonicalizes "k = v" pairs (sorted keys, normalized numbers) and hashes
// them with FNV-1a 64.
std::string config_hash(const std::map<std::string, std::string>& config);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

// Minimal CSV writer with deterministic formatting.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  void add_row(const std::vector<std::string>& cells);
  std::string str() const;
  void save(const std::string& path) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

// Parses a simple "key = value" config file ('#' comments, blank lines ok).
std::map<std::string, std::string> parse_key_value(const std::string& text);

}  // namespace dpreg
