#include "slab/manifest.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "slab/errors.hpp"

namespace slab {
namespace {

constexpr int kMaxIncludeDepth = 16;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

const char* version() { return "1.0.0"; }

Config Config::parse_file(const std::string& path) {
  Config c;
  c.parse_into(read_text(path), path, 0);
  return c;
}

Config Config::parse_string(const std::string& text, const std::string& origin) {
  Config c;
  c.parse_into(text, origin, 0);
  return c;
}

void Config::parse_into(const std::string& text, const std::string& origin, int depth) {
  if (depth > kMaxIncludeDepth) throw ConfigError(origin + ": include nesting too deep");
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    const std::string where = origin + ":" + std::to_string(lineno);
    if (t.front() == '[') {
      if (t.back() != ']') throw ConfigError(where + ": unterminated section header");
      section = trim(t.substr(1, t.size() - 2));
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected key = value, got \"" + t + "\"");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty()) throw ConfigError(where + ": empty key");
    if (key == "include") {
      std::filesystem::path p(value);
      if (p.is_relative()) p = std::filesystem::path(origin).parent_path() / p;
      parse_into(read_text(p.string()), p.string(), depth + 1);
      continue;
    }
    values_[section.empty() ? key : section + "." + key] = value;
  }
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key, double fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  const std::string& s = it->second;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ConfigError("config key '" + key + "': expected a number, got '" + s + "'");
  return v;
}

long long Config::get_int(const std::string& key, long long fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  const std::string& s = it->second;
  long long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ConfigError("config key '" + key + "': expected an integer, got '" + s + "'");
  return v;
}

std::uint64_t Config::get_uint(const std::string& key, std::uint64_t fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  const std::string& s = it->second;
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ConfigError("config key '" + key + "': expected a non-negative integer, got '" + s + "'");
  return v;
}

nlohmann::json Config::to_json() const {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [k, v] : values_) j[k] = v;
  return j;
}

std::string stable_hash(const std::string& text) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

nlohmann::json CalibratedConstants::to_json() const {
  nlohmann::json moll = nlohmann::json::object();
  for (const auto& [d, m] : mollifier)
    moll[std::to_string(d)] = {{"C_psi", m.C_psi},
                               {"C_tail", m.C_tail},
                               {"C_shift", m.C_shift},
                               {"tabulation_radius", m.tabulation_radius}};
  return {{"mollifier", moll}, {"C_41", C_41}, {"C_42", C_42},     {"c0", c0},
          {"C_61", C_61},      {"C_max", C_max}, {"C_cal", C_cal}, {"c_cal", c_cal},
          {"c_cal_pinned", c_cal_pinned}};
}

CalibratedConstants CalibratedConstants::from_json(const nlohmann::json& j) {
  try {
    CalibratedConstants c;
    for (const auto& [key, m] : j.at("mollifier").items())
      c.mollifier[std::stoi(key)] = {m.at("C_psi").get<double>(), m.at("C_tail").get<double>(),
                                     m.at("C_shift").get<double>(),
                                     m.at("tabulation_radius").get<double>()};
    c.C_41 = j.at("C_41").get<double>();
    c.C_42 = j.at("C_42").get<double>();
    c.c0 = j.at("c0").get<double>();
    c.C_61 = j.at("C_61").get<double>();
    c.C_max = j.at("C_max").get<double>();
    c.C_cal = j.at("C_cal").get<double>();
    c.c_cal = j.at("c_cal").get<double>();
    c.c_cal_pinned = j.at("c_cal_pinned").get<double>();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("manifest constants: ") + e.what());
  }
}

std::string RunManifest::config_hash() const { return stable_hash(config.dump()); }

nlohmann::json RunManifest::to_json() const {
  nlohmann::json j{{"tool", tool},
                   {"version", version},
                   {"config", config},
                   {"config_hash", config_hash()},
                   {"seed", seed},
                   {"constants", constants.to_json()}};
  j["hash"] = stable_hash(j.dump());
  j["timing"] = {{"seconds", seconds}};
  return j;
}

std::string RunManifest::hash() const { return to_json().at("hash").get<std::string>(); }

RunManifest RunManifest::from_json(const nlohmann::json& j) {
  try {
    RunManifest m;
    m.tool = j.at("tool").get<std::string>();
    m.version = j.at("version").get<std::string>();
    m.config = j.at("config");
    m.seed = j.at("seed").get<std::uint64_t>();
    m.constants = CalibratedConstants::from_json(j.at("constants"));
    if (j.contains("timing")) m.seconds = j.at("timing").value("seconds", 0.0);
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("manifest: ") + e.what());
  }
}

RunManifest RunManifest::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open manifest " + path);
  try {
    return from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

void RunManifest::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw IOError("cannot write manifest " + path);
  out << to_json().dump(2) << '\n';
}

}  // namespace slab
