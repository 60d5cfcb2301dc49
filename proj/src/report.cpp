#include "dpreg/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "dpreg/errors.hpp"

namespace dpreg {

const char* kArtifactVersion = "0.1.0";

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

// Numeric-looking values are rewritten via format_double so "1.0", "1" and
// "1.00" hash identically.
std::string normalize_value(const std::string& v) {
  if (v.empty()) return v;
  char* end = nullptr;
  const double d = std::strtod(v.c_str(), &end);
  if (end && *end == '\0') return format_double(d);
  return v;
}

}  // namespace

std::string config_hash(const std::map<std::string, std::string>& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&h](const std::string& s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
  };
  for (const auto& [k, v] : config) {  // std::map iterates sorted
    feed(k);
    feed("=");
    feed(normalize_value(v));
    feed("\n");
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string RunManifest::to_text() const {
  std::ostringstream os;
  os << "# dpreg run manifest\n";
  os << "# replay: dpreg bench --replay <this file>\n";
  os << "artifact_version = " << artifact_version << "\n";
  os << "config_hash = " << config_hash << "\n";
  os << "seed = " << seed << "\n";
  os << "timestamp = " << timestamp << "\n";
  os << "eps_total = " << format_double(eps_total) << "\n";
  os << "delta_total = " << format_double(delta_total) << "\n";
  for (const auto& [k, v] : config) {
    os << "config." << k << " = " << v << "\n";
  }
  return os.str();
}

RunManifest RunManifest::from_text(const std::string& text) {
  RunManifest m;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key == "artifact_version") m.artifact_version = val;
    else if (key == "config_hash") m.config_hash = val;
    else if (key == "seed") m.seed = std::strtoull(val.c_str(), nullptr, 10);
    else if (key == "timestamp") m.timestamp = val;
    else if (key == "eps_total") m.eps_total = std::strtod(val.c_str(), nullptr);
    else if (key == "delta_total") m.delta_total = std::strtod(val.c_str(), nullptr);
    else if (key.rfind("config.", 0) == 0) m.config[key.substr(7)] = val;
  }
  return m;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidParameter("cannot open for writing: " + path);
  out << content;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidParameter("cannot open for reading: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

CsvWriter::CsvWriter(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvWriter::add_row(const std::vector<std::string>& cells) {
  if (cells.size() != header_.size()) {
    throw InvalidParameter("CsvWriter: row width mismatch");
  }
  rows_.push_back(cells);
}

std::string CsvWriter::str() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < header_.size(); ++i) {
    os << header_[i] << (i + 1 < header_.size() ? "," : "\n");
  }
  for (const auto& row : rows_) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      os << row[i] << (i + 1 < row.size() ? "," : "\n");
    }
  }
  return os.str();
}

void CsvWriter::save(const std::string& path) const { write_text_file(path, str()); }

std::map<std::string, std::string> parse_key_value(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw InvalidParameter("config line missing '=': " + line);
    }
    out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return out;
}

}  // namespace dpreg
