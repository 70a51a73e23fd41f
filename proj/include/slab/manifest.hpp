#pragma once

#include <cstdint>
#include <map>
#include <string>

#include <nlohmann/json.hpp>

namespace slab {

// Flat key = value configuration. "[section]" headers prefix later keys with
// "section."; "include = path" splices another file (relative to the
// including file). Lines starting with '#' or ';' are comments.
class Config {
 public:
  static Config parse_file(const std::string& path);
  static Config parse_string(const std::string& text, const std::string& origin = "<string>");

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  const std::map<std::string, std::string>& values() const { return values_; }

  // Typed lookups; a malformed value throws ConfigError naming the key.
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  long long get_int(const std::string& key, long long fallback) const;
  std::uint64_t get_uint(const std::string& key, std::uint64_t fallback) const;

  nlohmann::json to_json() const;

 private:
  void parse_into(const std::string& text, const std::string& origin, int depth);
  std::map<std::string, std::string> values_;
};

// 64-bit FNV-1a of a string, as 16 hex digits.
std::string stable_hash(const std::string& text);

struct MollifierConstants {
  double C_psi = 0.0;
  double C_tail = 0.0;
  double C_shift = 0.0;
  double tabulation_radius = 0.0;
};

struct CalibratedConstants {
  std::map<int, MollifierConstants> mollifier;  // keyed by dimension
  double C_41 = 0.0;
  double C_42 = 0.0;
  double c0 = 0.0;
  double C_61 = 0.0;
  double C_max = 0.0;
  double C_cal = 0.0;
  double c_cal = 0.0;         // eta <= c_cal eps^{5/2} for unpinned runs
  double c_cal_pinned = 0.0;  // eta <= c_cal_pinned eps^3 for pinned runs

  nlohmann::json to_json() const;
  static CalibratedConstants from_json(const nlohmann::json& j);
};

struct RunManifest {
  std::string tool = "slab";
  std::string version;
  nlohmann::json config = nlohmann::json::object();
  std::uint64_t seed = 0;
  CalibratedConstants constants;
  double seconds = 0.0;  // wall time; excluded from the hash

  std::string config_hash() const;
  // Hash of everything except timing.
  std::string hash() const;
  nlohmann::json to_json() const;
  static RunManifest from_json(const nlohmann::json& j);
  static RunManifest load(const std::string& path);
  void save(const std::string& path) const;
};

// Library version string.
const char* version();

}  // namespace slab
