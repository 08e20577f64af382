#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

namespace nipoly::cli {

inline constexpr const char* kArtifactVersion = "1.0.0";

enum class ParamType { Int, Real, IntPair, Choice, RealList };

struct ParamSpec {
  std::string name;
  ParamType type;
  std::string default_value;
  double min = -1e300;
  double max = 1e300;
  std::vector<std::string> choices;
  std::string help;
};

using Value = std::variant<std::int64_t, double, std::string, std::vector<std::int64_t>, std::vector<double>>;

// Parameter or usage problem; maps to exit status 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string subcommand;
  std::map<std::string, Value> params;
  std::map<std::string, std::string> raw;  // validated text, echoed in the manifest
  std::uint64_t seed = 1;
  int replicas = 20;
  unsigned threads = 0;
  std::string out_dir;
  std::vector<std::string> formats{"csv", "json"};
  bool fresh = false;

  std::int64_t i(const std::string& k) const { return std::get<std::int64_t>(params.at(k)); }
  double r(const std::string& k) const { return std::get<double>(params.at(k)); }
  const std::string& s(const std::string& k) const { return std::get<std::string>(params.at(k)); }
  const std::vector<std::int64_t>& pair(const std::string& k) const {
    return std::get<std::vector<std::int64_t>>(params.at(k));
  }
  const std::vector<double>& list(const std::string& k) const { return std::get<std::vector<double>>(params.at(k)); }
  bool wants(const std::string& fmt) const;
};

// key=value lines; '#' starts a comment; blank lines ignored.
std::map<std::string, std::string> read_config_file(const std::string& path);

// Typed parse of every schema key (defaults < file < flags); unknown keys,
// malformed values and out-of-range values raise ConfigError.
RunConfig build_config(const std::string& subcommand, const std::vector<ParamSpec>& schema,
                       const std::map<std::string, std::string>& file_values,
                       const std::map<std::string, std::string>& flag_values);

// 64-bit FNV-1a.
std::uint64_t fnv1a64(const std::string& bytes);
std::string hex64(std::uint64_t v);
std::string config_fingerprint(const RunConfig& cfg);

// Shortest round-trip decimal form of a double, locale independent.
std::string fmt_double(double v);

// CSV with a mandatory header row, ',' separators and LF line endings.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header) : header_(std::move(header)) {}
  void row(const std::vector<std::string>& cells);
  std::string str() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

// Validation against the subset of JSON Schema used by the shipped schema
// files: type, required, properties, additionalProperties, items, enum,
// minimum, minItems. Returns the list of violations (empty if valid).
std::vector<std::string> validate_json(const nlohmann::json& doc, const nlohmann::json& schema,
                                       const std::string& path = "$");

const nlohmann::json& summary_schema();
const nlohmann::json& manifest_schema();
const nlohmann::json& error_schema();

struct OutputFile {
  std::string name;
  std::string content;
};

// Writes the files and a manifest.json (config echo, version, wall clock,
// per-file FNV-1a checksums) into cfg.out_dir.
void write_outputs(const RunConfig& cfg, const std::vector<OutputFile>& files, double wall_seconds);

}  // namespace nipoly::cli
