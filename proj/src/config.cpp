#include "config.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "csv.hpp"
#include "error.hpp"

extern char** environ;

namespace ipdyn {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

bool valid_key(const std::string& key) {
  if (key.empty()) return false;
  for (char c : key) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '.') return false;
  }
  return key.front() != '.' && key.back() != '.';
}

double to_double(const std::string& key, const std::string& value) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(value.c_str(), &end);
  if (end == value.c_str() || *end != '\0' || errno == ERANGE)
    throw_parse("config key '" + key + "': expected a number, got '" + value + "'");
  return v;
}

long to_long(const std::string& key, const std::string& value) {
  errno = 0;
  char* end = nullptr;
  const long v = std::strtol(value.c_str(), &end, 10);
  if (end == value.c_str() || *end != '\0' || errno == ERANGE)
    throw_parse("config key '" + key + "': expected an integer, got '" + value + "'");
  return v;
}

bool to_bool(const std::string& key, std::string value) {
  std::transform(value.begin(), value.end(), value.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  throw_parse("config key '" + key + "': expected a boolean, got '" + value + "'");
}

}  // namespace

Config::Config() { values_["schema_version"] = "1"; }

Config Config::parse(const std::string& text) {
  Config cfg;
  cfg.values_.clear();
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw_parse("config line " + std::to_string(line_no) + ": expected 'key = value', got '" +
                  line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!valid_key(key))
      throw_parse("config line " + std::to_string(line_no) + ": invalid key '" + key + "'");
    if (cfg.values_.count(key))
      throw_parse("config line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    cfg.values_[key] = value;
  }
  const auto it = cfg.values_.find("schema_version");
  if (it == cfg.values_.end()) throw_parse("config is missing required key 'schema_version'");
  if (it->second != "1") throw_parse("unsupported schema_version '" + it->second + "' (expected 1)");
  return cfg;
}

Config Config::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw_io("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse(buf.str());
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

bool Config::has(const std::string& key) const { return values_.count(key) != 0; }

std::optional<std::string> Config::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  const auto v = get(key);
  return v ? *v : fallback;
}

double Config::get_double(const std::string& key, double fallback) const {
  const auto v = get(key);
  return v ? to_double(key, *v) : fallback;
}

long Config::get_long(const std::string& key, long fallback) const {
  const auto v = get(key);
  return v ? to_long(key, *v) : fallback;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  const auto v = get(key);
  return v ? to_bool(key, *v) : fallback;
}

std::vector<std::string> Config::get_list(const std::string& key,
                                          const std::vector<std::string>& fallback) const {
  const auto v = get(key);
  if (!v || trim(*v).empty()) return fallback;
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(*v);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (item.empty()) throw_parse("config key '" + key + "': empty list element");
    out.push_back(item);
  }
  return out;
}

void Config::set(const std::string& key, const std::string& value) {
  if (!valid_key(key)) throw_invalid("invalid config key '" + key + "'");
  values_[key] = value;
}

void Config::set(const std::string& key, double value) { set(key, format_double(value)); }

void Config::set(const std::string& key, long value) { set(key, std::to_string(value)); }

void Config::set(const std::string& key, bool value) {
  set(key, std::string(value ? "true" : "false"));
}

void Config::apply_env() {
  static const std::string prefix = "IPDYN_";
  for (char** p = environ; p && *p; ++p) {
    const std::string entry(*p);
    if (entry.compare(0, prefix.size(), prefix) != 0) continue;
    const auto eq = entry.find('=');
    if (eq == std::string::npos || eq <= prefix.size()) continue;
    std::string key = entry.substr(prefix.size(), eq - prefix.size());
    std::string::size_type pos;
    while ((pos = key.find("__")) != std::string::npos) key.replace(pos, 2, ".");
    std::transform(key.begin(), key.end(), key.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (!valid_key(key))
      throw_parse("environment override " + entry.substr(0, eq) + " has an invalid key");
    values_[key] = entry.substr(eq + 1);
  }
}

std::string Config::echo() const {
  std::string out;
  for (const auto& [key, value] : values_) {
    out += key;
    out += " = ";
    out += value;
    out += '\n';
  }
  return out;
}

}  // namespace ipdyn
