#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace meanfield::cli {

/// Invalid or incomplete run configuration (exit status 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// INI-style `[section]` / `key = value` configuration. Every lookup is
/// recorded with its resolved value, so the effective configuration
/// (defaults included) can be echoed into reports.
class Config {
 public:
  static Config parse(std::istream& in);
  static Config load(const std::string& path);

  bool has_section(const std::string& section) const;
  /// Sections whose name starts with `prefix`, in file order.
  std::vector<std::string> sections_with_prefix(const std::string& prefix) const;

  /// Replaces (or adds) a value before it is read.
  void set(const std::string& section, const std::string& key, const std::string& value);

  bool has(const std::string& section, const std::string& key) const;
  std::string get_string(const std::string& section, const std::string& key,
                         const std::optional<std::string>& fallback = std::nullopt);
  double get_double(const std::string& section, const std::string& key,
                    const std::optional<double>& fallback = std::nullopt);
  int get_int(const std::string& section, const std::string& key, const std::optional<int>& fallback = std::nullopt);
  bool get_bool(const std::string& section, const std::string& key, const std::optional<bool>& fallback = std::nullopt);
  /// Whitespace- or comma-separated lists.
  std::vector<double> get_doubles(const std::string& section, const std::string& key,
                                  const std::optional<std::vector<double>>& fallback = std::nullopt);
  std::vector<int> get_ints(const std::string& section, const std::string& key,
                            const std::optional<std::vector<int>>& fallback = std::nullopt);

  /// Records a derived value (e.g. a default that depends on other keys).
  void record(const std::string& section, const std::string& key, nlohmann::ordered_json value);

  /// Throws ConfigError naming the first key that was never read.
  void check_consumed() const;

  const nlohmann::ordered_json& effective() const { return effective_; }

 private:
  std::optional<std::string> raw(const std::string& section, const std::string& key);

  std::vector<std::pair<std::string, std::vector<std::pair<std::string, std::string>>>> sections_;
  std::set<std::pair<std::string, std::string>> consumed_;
  nlohmann::ordered_json effective_ = nlohmann::ordered_json::object();
};

}  // namespace meanfield::cli
