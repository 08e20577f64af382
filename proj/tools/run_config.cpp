#include "run_config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "nipoly_schemas.hpp"

namespace nipoly::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(trim(cur));
  return out;
}

std::int64_t parse_int(const std::string& key, const std::string& v) {
  std::int64_t x = 0;
  const auto* end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, x);
  if (ec != std::errc() || p != end) {
    // Accept integral reals such as 1e5.
    double d = 0.0;
    auto [q, ec2] = std::from_chars(v.data(), end, d);
    if (ec2 != std::errc() || q != end || d != std::floor(d) || std::fabs(d) > 9e15)
      throw ConfigError("parameter '" + key + "': expected an integer, got '" + v + "'");
    x = static_cast<std::int64_t>(d);
  }
  return x;
}

double parse_real(const std::string& key, const std::string& v) {
  double x = 0.0;
  const auto* end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, x);
  if (ec != std::errc() || p != end || !std::isfinite(x))
    throw ConfigError("parameter '" + key + "': expected a real number, got '" + v + "'");
  return x;
}

void check_range(const ParamSpec& spec, double x) {
  if (x < spec.min || x > spec.max)
    throw ConfigError("parameter '" + spec.name + "' = " + fmt_double(x) + " outside [" + fmt_double(spec.min) +
                      ", " + fmt_double(spec.max) + "]");
}

Value parse_value(const ParamSpec& spec, const std::string& text) {
  switch (spec.type) {
    case ParamType::Int: {
      const auto x = parse_int(spec.name, text);
      check_range(spec, static_cast<double>(x));
      return x;
    }
    case ParamType::Real: {
      const double x = parse_real(spec.name, text);
      check_range(spec, x);
      return x;
    }
    case ParamType::IntPair: {
      const auto parts = split(text, ',');
      if (parts.size() != 2) throw ConfigError("parameter '" + spec.name + "': expected 'a,b', got '" + text + "'");
      std::vector<std::int64_t> v{parse_int(spec.name, parts[0]), parse_int(spec.name, parts[1])};
      for (auto x : v) check_range(spec, static_cast<double>(x));
      return v;
    }
    case ParamType::RealList: {
      std::vector<double> v;
      for (const auto& p : split(text, ',')) {
        v.push_back(parse_real(spec.name, p));
        check_range(spec, v.back());
      }
      if (v.empty()) throw ConfigError("parameter '" + spec.name + "': empty list");
      return v;
    }
    case ParamType::Choice:
      if (std::find(spec.choices.begin(), spec.choices.end(), text) == spec.choices.end()) {
        std::string all;
        for (const auto& c : spec.choices) all += (all.empty() ? "" : "|") + c;
        throw ConfigError("parameter '" + spec.name + "': expected one of " + all + ", got '" + text + "'");
      }
      return text;
  }
  throw ConfigError("unreachable parameter type");
}

}  // namespace

bool RunConfig::wants(const std::string& fmt) const {
  return std::find(formats.begin(), formats.end(), fmt) != formats.end();
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::map<std::string, std::string> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key=value");
    const auto key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError(path + ":" + std::to_string(lineno) + ": empty key");
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

RunConfig build_config(const std::string& subcommand, const std::vector<ParamSpec>& schema,
                       const std::map<std::string, std::string>& file_values,
                       const std::map<std::string, std::string>& flag_values) {
  static const std::vector<std::string> kCommon{"seed", "replicas", "threads", "out", "format", "fresh"};
  RunConfig cfg;
  cfg.subcommand = subcommand;
  std::map<std::string, std::string> merged;
  for (const auto& p : schema) merged[p.name] = p.default_value;
  auto known = [&](const std::string& k) {
    return std::find(kCommon.begin(), kCommon.end(), k) != kCommon.end() ||
           std::any_of(schema.begin(), schema.end(), [&](const ParamSpec& p) { return p.name == k; });
  };
  for (const auto* src : {&file_values, &flag_values})
    for (const auto& [k, v] : *src) {
      if (!known(k)) throw ConfigError("unknown parameter '" + k + "' for subcommand " + subcommand);
      merged[k] = v;
    }
  for (const auto& p : schema) {
    cfg.params[p.name] = parse_value(p, merged[p.name]);
    cfg.raw[p.name] = merged[p.name];
  }
  if (merged.count("seed")) {
    const auto s = parse_int("seed", merged["seed"]);
    if (s < 0) throw ConfigError("parameter 'seed' must be non-negative");
    cfg.seed = static_cast<std::uint64_t>(s);
  }
  if (merged.count("replicas")) {
    const auto r = parse_int("replicas", merged["replicas"]);
    if (r < 1 || r > 10'000'000) throw ConfigError("parameter 'replicas' must be in [1, 1e7]");
    cfg.replicas = static_cast<int>(r);
  }
  if (merged.count("threads")) {
    const auto t = parse_int("threads", merged["threads"]);
    if (t < 0 || t > 1024) throw ConfigError("parameter 'threads' must be in [0, 1024]");
    cfg.threads = static_cast<unsigned>(t);
  }
  if (merged.count("format")) {
    cfg.formats.clear();
    for (const auto& f : split(merged["format"], ',')) {
      if (f != "csv" && f != "json") throw ConfigError("format must be csv, json or csv,json; got '" + f + "'");
      if (!cfg.wants(f)) cfg.formats.push_back(f);
    }
    if (cfg.formats.empty()) throw ConfigError("no output format selected");
  }
  if (merged.count("fresh")) cfg.fresh = merged["fresh"] == "1" || merged["fresh"] == "true";
  if (merged.count("out")) {
    cfg.out_dir = merged["out"];
  } else if (const char* env = std::getenv("NIPOLY_OUT"); env && *env) {
    cfg.out_dir = env;
  } else {
    cfg.out_dir = "nipoly-out";
  }
  return cfg;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string config_fingerprint(const RunConfig& cfg) {
  std::string s = cfg.subcommand + "|" + std::to_string(cfg.seed) + "|" + std::to_string(cfg.replicas) + "|" +
                  kArtifactVersion;
  for (const auto& [k, v] : cfg.raw) s += "|" + k + "=" + v;
  return hex64(fnv1a64(s));
}

std::string fmt_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != header_.size()) throw std::logic_error("CsvWriter: row width differs from header");
  rows_.push_back(cells);
}

std::string CsvWriter::str() const {
  std::string out;
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  line(header_);
  for (const auto& r : rows_) line(r);
  return out;
}

std::vector<std::string> validate_json(const nlohmann::json& doc, const nlohmann::json& schema, const std::string& path) {
  using nlohmann::json;
  std::vector<std::string> errs;
  auto type_ok = [&](const std::string& t) {
    if (t == "object") return doc.is_object();
    if (t == "array") return doc.is_array();
    if (t == "string") return doc.is_string();
    if (t == "boolean") return doc.is_boolean();
    if (t == "null") return doc.is_null();
    if (t == "integer") return doc.is_number_integer();
    if (t == "number") return doc.is_number();
    return false;
  };
  if (schema.contains("type")) {
    const auto& t = schema["type"];
    bool ok = false;
    if (t.is_string()) ok = type_ok(t.get<std::string>());
    else
      for (const auto& x : t) ok = ok || type_ok(x.get<std::string>());
    if (!ok) {
      errs.push_back(path + ": wrong type, expected " + t.dump());
      return errs;
    }
  }
  if (schema.contains("enum")) {
    const auto& e = schema["enum"];
    if (std::find(e.begin(), e.end(), doc) == e.end()) errs.push_back(path + ": value not in enum");
  }
  if (schema.contains("minimum") && doc.is_number() && doc.get<double>() < schema["minimum"].get<double>())
    errs.push_back(path + ": below minimum");
  if (doc.is_object()) {
    if (schema.contains("required"))
      for (const auto& r : schema["required"])
        if (!doc.contains(r.get<std::string>())) errs.push_back(path + ": missing required '" + r.get<std::string>() + "'");
    const json props = schema.value("properties", json::object());
    for (const auto& [k, v] : doc.items()) {
      const std::string sub = path + "." + k;
      if (props.contains(k)) {
        auto e = validate_json(v, props[k], sub);
        errs.insert(errs.end(), e.begin(), e.end());
      } else if (schema.contains("additionalProperties")) {
        const auto& ap = schema["additionalProperties"];
        if (ap.is_boolean()) {
          if (!ap.get<bool>()) errs.push_back(sub + ": additional property not allowed");
        } else {
          auto e = validate_json(v, ap, sub);
          errs.insert(errs.end(), e.begin(), e.end());
        }
      }
    }
  }
  if (doc.is_array()) {
    if (schema.contains("minItems") && doc.size() < schema["minItems"].get<std::size_t>())
      errs.push_back(path + ": too few items");
    if (schema.contains("items"))
      for (std::size_t i = 0; i < doc.size(); ++i) {
        auto e = validate_json(doc[i], schema["items"], path + "[" + std::to_string(i) + "]");
        errs.insert(errs.end(), e.begin(), e.end());
      }
  }
  return errs;
}

const nlohmann::json& summary_schema() {
  static const auto j = nlohmann::json::parse(schemas::kSummary);
  return j;
}
const nlohmann::json& manifest_schema() {
  static const auto j = nlohmann::json::parse(schemas::kManifest);
  return j;
}
const nlohmann::json& error_schema() {
  static const auto j = nlohmann::json::parse(schemas::kError);
  return j;
}

void write_outputs(const RunConfig& cfg, const std::vector<OutputFile>& files, double wall_seconds) {
  namespace fs = std::filesystem;
  fs::create_directories(cfg.out_dir);
  nlohmann::json manifest;
  manifest["artifact"] = "nipoly";
  manifest["artifact_version"] = kArtifactVersion;
  manifest["subcommand"] = cfg.subcommand;
  nlohmann::json params = nlohmann::json::object();
  for (const auto& [k, v] : cfg.raw) params[k] = v;
  manifest["config"] = {{"seed", cfg.seed},
                        {"replicas", cfg.replicas},
                        {"threads", cfg.threads},
                        {"formats", cfg.formats},
                        {"parameters", params}};
  manifest["config_fingerprint"] = config_fingerprint(cfg);
  manifest["wall_clock_seconds"] = wall_seconds;
  manifest["files"] = nlohmann::json::array();
  for (const auto& f : files) {
    std::ofstream out(fs::path(cfg.out_dir) / f.name, std::ios::binary);
    out << f.content;
    if (!out) throw std::runtime_error("cannot write " + f.name);
    manifest["files"].push_back({{"name", f.name}, {"bytes", f.content.size()}, {"fnv1a64", hex64(fnv1a64(f.content))}});
  }
  const auto errs = validate_json(manifest, manifest_schema());
  if (!errs.empty()) throw std::logic_error("manifest violates its schema: " + errs.front());
  std::ofstream out(fs::path(cfg.out_dir) / "manifest.json", std::ios::binary);
  out << manifest.dump(2) << '\n';
}

}  // namespace nipoly::cli
