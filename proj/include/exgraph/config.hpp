#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

#include "exgraph/text.hpp"

namespace exgraph {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Flat key/value store read from a TOML-style file: `[section]` headers,
/// `key = value` lines, `#` comments, values bare or double-quoted. Keys are
/// addressed as "section.key".
class Config {
 public:
  static Config parse(std::istream& in) {
    Config cfg;
    std::string section;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      std::string_view t = trim(strip_comment(line));
      if (t.empty()) continue;
      if (t.front() == '[') {
        if (t.back() != ']') throw error(lineno, "unterminated section header");
        section = std::string(trim(t.substr(1, t.size() - 2)));
        continue;
      }
      auto eq = t.find('=');
      if (eq == std::string_view::npos) throw error(lineno, "expected key = value");
      std::string key(trim(t.substr(0, eq)));
      if (key.empty()) throw error(lineno, "empty key");
      std::string_view raw = trim(t.substr(eq + 1));
      std::string value;
      if (!raw.empty() && raw.front() == '"') {
        if (raw.size() < 2 || raw.back() != '"') throw error(lineno, "unterminated string");
        value = unescape(raw.substr(1, raw.size() - 2));
      } else {
        value = std::string(raw);
      }
      cfg.values_[section.empty() ? key : section + "." + key] = value;
    }
    return cfg;
  }

  static Config load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    return parse(in);
  }

  void set(const std::string& key, std::string value) { values_[key] = std::move(value); }

  bool has(const std::string& key) const { return values_.count(key) != 0; }

  std::optional<std::string> get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return it->second;
  }

  std::string get_string(const std::string& key, std::string fallback = {}) const {
    return get(key).value_or(std::move(fallback));
  }

  long long get_int(const std::string& key, long long fallback) const {
    auto v = get(key);
    if (!v) return fallback;
    try {
      std::size_t used = 0;
      long long x = std::stoll(*v, &used);
      if (used != v->size()) throw std::invalid_argument(*v);
      return x;
    } catch (const std::exception&) {
      throw ConfigError("config key '" + key + "': expected integer, got '" + *v + "'");
    }
  }

  double get_double(const std::string& key, double fallback) const {
    auto v = get(key);
    if (!v) return fallback;
    try {
      std::size_t used = 0;
      double x = std::stod(*v, &used);
      if (used != v->size()) throw std::invalid_argument(*v);
      return x;
    } catch (const std::exception&) {
      throw ConfigError("config key '" + key + "': expected number, got '" + *v + "'");
    }
  }

  bool get_bool(const std::string& key, bool fallback) const {
    auto v = get(key);
    if (!v) return fallback;
    if (*v == "true") return true;
    if (*v == "false") return false;
    throw ConfigError("config key '" + key + "': expected true/false, got '" + *v + "'");
  }

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  static ConfigError error(std::size_t line, const std::string& what) {
    return ConfigError("config line " + std::to_string(line) + ": " + what);
  }

  static std::string_view strip_comment(std::string_view line) {
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"' && (i == 0 || line[i - 1] != '\\')) quoted = !quoted;
      if (line[i] == '#' && !quoted) return line.substr(0, i);
    }
    return line;
  }

  static std::string unescape(std::string_view s) {
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] == '\\' && i + 1 < s.size()) {
        ++i;
        out.push_back(s[i] == 'n' ? '\n' : s[i] == 't' ? '\t' : s[i]);
      } else {
        out.push_back(s[i]);
      }
    }
    return out;
  }

  std::map<std::string, std::string> values_;
};

inline void require_file(const std::string& key, const std::string& path) {
  if (path.empty()) return;
  if (!std::filesystem::is_regular_file(path))
    throw ConfigError("config key '" + key + "': file '" + path + "' does not exist");
}

// Paths in a config file are resolved relative to the file's directory.
inline std::string resolve_path(const std::string& config_path, const std::string& p) {
  if (p.empty() || config_path.empty()) return p;
  std::filesystem::path fp(p);
  if (fp.is_absolute()) return p;
  return (std::filesystem::path(config_path).parent_path() / fp).lexically_normal().string();
}

}  // namespace exgraph
