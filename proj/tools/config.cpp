#include "config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace meanfield::cli {

namespace {

std::string where(const std::string& section, const std::string& key) { return "[" + section + "] " + key; }

double parse_double(const std::string& text, const std::string& context) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || text.empty()) {
    throw ConfigError("invalid number '" + text + "' for " + context);
  }
  return value;
}

int parse_int(const std::string& text, const std::string& context) {
  int value = 0;
  const char* first = text.data();
  const char* last = first + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || text.empty()) {
    throw ConfigError("invalid integer '" + text + "' for " + context);
  }
  return value;
}

std::vector<std::string> split_list(const std::string& text) {
  std::string spaced = text;
  std::replace(spaced.begin(), spaced.end(), ',', ' ');
  std::istringstream in(spaced);
  std::vector<std::string> items;
  for (std::string item; in >> item;) items.push_back(item);
  return items;
}

}  // namespace

Config Config::parse(std::istream& in) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError("malformed config: " + e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  Config cfg;
  for (const auto& [name, section] : tree) {
    if (section.empty() && !section.data().empty()) {
      throw ConfigError("key '" + name + "' outside of any section");
    }
    auto& entries = cfg.sections_.emplace_back(name, std::vector<std::pair<std::string, std::string>>{}).second;
    for (const auto& [key, value] : section) entries.emplace_back(key, value.data());
  }
  return cfg;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse(in);
}

bool Config::has_section(const std::string& section) const {
  return std::any_of(sections_.begin(), sections_.end(), [&](const auto& s) { return s.first == section; });
}

std::vector<std::string> Config::sections_with_prefix(const std::string& prefix) const {
  std::vector<std::string> out;
  for (const auto& s : sections_) {
    if (s.first.rfind(prefix, 0) == 0) out.push_back(s.first);
  }
  return out;
}

void Config::set(const std::string& section, const std::string& key, const std::string& value) {
  auto it = std::find_if(sections_.begin(), sections_.end(), [&](const auto& s) { return s.first == section; });
  if (it == sections_.end()) {
    sections_.emplace_back(section, std::vector<std::pair<std::string, std::string>>{});
    it = std::prev(sections_.end());
  }
  for (auto& [k, v] : it->second) {
    if (k == key) {
      v = value;
      return;
    }
  }
  it->second.emplace_back(key, value);
}

bool Config::has(const std::string& section, const std::string& key) const {
  for (const auto& s : sections_) {
    if (s.first != section) continue;
    for (const auto& [k, v] : s.second) {
      if (k == key) return true;
    }
  }
  return false;
}

std::optional<std::string> Config::raw(const std::string& section, const std::string& key) {
  for (const auto& s : sections_) {
    if (s.first != section) continue;
    for (const auto& [k, v] : s.second) {
      if (k == key) {
        consumed_.emplace(section, key);
        return v;
      }
    }
  }
  return std::nullopt;
}

void Config::record(const std::string& section, const std::string& key, nlohmann::ordered_json value) {
  effective_[section][key] = std::move(value);
}

std::string Config::get_string(const std::string& section, const std::string& key,
                               const std::optional<std::string>& fallback) {
  auto text = raw(section, key);
  if (!text) {
    if (!fallback) throw ConfigError("missing key " + where(section, key));
    text = fallback;
  }
  record(section, key, *text);
  return *text;
}

double Config::get_double(const std::string& section, const std::string& key, const std::optional<double>& fallback) {
  const auto text = raw(section, key);
  double value = 0.0;
  if (text) {
    value = parse_double(*text, where(section, key));
  } else if (fallback) {
    value = *fallback;
  } else {
    throw ConfigError("missing key " + where(section, key));
  }
  record(section, key, value);
  return value;
}

int Config::get_int(const std::string& section, const std::string& key, const std::optional<int>& fallback) {
  const auto text = raw(section, key);
  int value = 0;
  if (text) {
    value = parse_int(*text, where(section, key));
  } else if (fallback) {
    value = *fallback;
  } else {
    throw ConfigError("missing key " + where(section, key));
  }
  record(section, key, value);
  return value;
}

bool Config::get_bool(const std::string& section, const std::string& key, const std::optional<bool>& fallback) {
  const auto text = raw(section, key);
  bool value = false;
  if (text) {
    if (*text == "true" || *text == "1" || *text == "yes") {
      value = true;
    } else if (*text == "false" || *text == "0" || *text == "no") {
      value = false;
    } else {
      throw ConfigError("invalid boolean '" + *text + "' for " + where(section, key));
    }
  } else if (fallback) {
    value = *fallback;
  } else {
    throw ConfigError("missing key " + where(section, key));
  }
  record(section, key, value);
  return value;
}

std::vector<double> Config::get_doubles(const std::string& section, const std::string& key,
                                        const std::optional<std::vector<double>>& fallback) {
  const auto text = raw(section, key);
  std::vector<double> values;
  if (text) {
    for (const auto& item : split_list(*text)) values.push_back(parse_double(item, where(section, key)));
    if (values.empty()) throw ConfigError("empty list for " + where(section, key));
  } else if (fallback) {
    values = *fallback;
  } else {
    throw ConfigError("missing key " + where(section, key));
  }
  record(section, key, values);
  return values;
}

std::vector<int> Config::get_ints(const std::string& section, const std::string& key,
                                  const std::optional<std::vector<int>>& fallback) {
  const auto text = raw(section, key);
  std::vector<int> values;
  if (text) {
    for (const auto& item : split_list(*text)) values.push_back(parse_int(item, where(section, key)));
    if (values.empty()) throw ConfigError("empty list for " + where(section, key));
  } else if (fallback) {
    values = *fallback;
  } else {
    throw ConfigError("missing key " + where(section, key));
  }
  record(section, key, values);
  return values;
}

void Config::check_consumed() const {
  for (const auto& s : sections_) {
    for (const auto& [k, v] : s.second) {
      if (!consumed_.count({s.first, k})) throw ConfigError("unknown key " + where(s.first, k));
    }
  }
}

}  // namespace meanfield::cli
