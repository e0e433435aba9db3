#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ipdyn {

// Flat dotted-key configuration: `section.key = value` lines, '#' comments.
// Files must declare `schema_version = 1`. Environment variables prefixed
// IPDYN_ override file values when apply_env() is called (double underscore
// maps to a dot, names are lowercased), and explicit set() calls -- the CLI
// flags -- override both.
class Config {
 public:
  Config();

  static Config parse(const std::string& text);
  static Config from_file(const std::string& path);

  bool has(const std::string& key) const;
  std::optional<std::string> get(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  long get_long(const std::string& key, long fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  // Comma-separated list; empty value or absent key yields the fallback.
  std::vector<std::string> get_list(const std::string& key,
                                    const std::vector<std::string>& fallback) const;

  void set(const std::string& key, const std::string& value);
  // Keeps string literals away from the bool overload.
  void set(const std::string& key, const char* value) { set(key, std::string(value)); }
  void set(const std::string& key, double value);
  void set(const std::string& key, long value);
  void set(const std::string& key, bool value);

  // Pulls IPDYN_* environment variables into the config.
  void apply_env();

  // Canonical echo: one sorted `key = value` line each, parseable by parse().
  std::string echo() const;

  const std::map<std::string, std::string>& entries() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace ipdyn
