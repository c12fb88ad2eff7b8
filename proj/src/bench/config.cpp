#include "qmee/bench/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace qmee::bench {
namespace {

std::string trim(const std::string& s) {
  std::size_t begin = 0;
  std::size_t end = s.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
  return s.substr(begin, end - begin);
}

}  // namespace

KeyValueConfig KeyValueConfig::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file: " + path);
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_string(buffer.str());
}

KeyValueConfig KeyValueConfig::parse_string(const std::string& text) {
  KeyValueConfig config;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.resize(hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError("line " + std::to_string(line_number) +
                          ": unterminated section header");
      }
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) {
        throw ConfigError("line " + std::to_string(line_number) +
                          ": empty section name");
      }
      config.values_[section];  // a section may legitimately stay empty
      config.order_[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_number) +
                        ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError("line " + std::to_string(line_number) + ": empty key");
    }
    if (config.values_[section].count(key) != 0) {
      throw ConfigError("line " + std::to_string(line_number) +
                        ": duplicate key '" + key + "' in section '" + section +
                        "'");
    }
    config.values_[section][key] = value;
    config.order_[section].push_back(key);
  }
  return config;
}

bool KeyValueConfig::has_section(const std::string& section) const {
  return values_.count(section) != 0;
}

bool KeyValueConfig::has(const std::string& section,
                         const std::string& key) const {
  const auto it = values_.find(section);
  return it != values_.end() && it->second.count(key) != 0;
}

std::string KeyValueConfig::get_string(const std::string& section,
                                       const std::string& key) const {
  const auto it = values_.find(section);
  if (it == values_.end() || it->second.count(key) == 0) {
    throw ConfigError("missing config key '" + key + "'" +
                      (section.empty() ? "" : " in section [" + section + "]"));
  }
  return it->second.at(key);
}

std::string KeyValueConfig::get_string_or(const std::string& section,
                                          const std::string& key,
                                          const std::string& fallback) const {
  return has(section, key) ? get_string(section, key) : fallback;
}

double KeyValueConfig::get_double(const std::string& section,
                                  const std::string& key) const {
  const std::string raw = get_string(section, key);
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(raw, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != raw.size() || used == 0) {
    throw ConfigError("config key '" + key + "' is not a number: '" + raw + "'");
  }
  return value;
}

double KeyValueConfig::get_double_or(const std::string& section,
                                     const std::string& key,
                                     double fallback) const {
  return has(section, key) ? get_double(section, key) : fallback;
}

std::int64_t KeyValueConfig::get_int(const std::string& section,
                                     const std::string& key) const {
  const std::string raw = get_string(section, key);
  std::size_t used = 0;
  std::int64_t value = 0;
  try {
    value = std::stoll(raw, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != raw.size() || used == 0) {
    throw ConfigError("config key '" + key + "' is not an integer: '" + raw +
                      "'");
  }
  return value;
}

std::int64_t KeyValueConfig::get_int_or(const std::string& section,
                                        const std::string& key,
                                        std::int64_t fallback) const {
  return has(section, key) ? get_int(section, key) : fallback;
}

std::uint64_t KeyValueConfig::get_uint64_or(const std::string& section,
                                            const std::string& key,
                                            std::uint64_t fallback) const {
  if (!has(section, key)) return fallback;
  const std::string raw = get_string(section, key);
  std::size_t used = 0;
  std::uint64_t value = 0;
  try {
    value = std::stoull(raw, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != raw.size() || used == 0) {
    throw ConfigError("config key '" + key + "' is not an unsigned integer: '" +
                      raw + "'");
  }
  return value;
}

bool KeyValueConfig::get_bool_or(const std::string& section,
                                 const std::string& key, bool fallback) const {
  if (!has(section, key)) return fallback;
  const std::string raw = get_string(section, key);
  if (raw == "true" || raw == "1" || raw == "yes") return true;
  if (raw == "false" || raw == "0" || raw == "no") return false;
  throw ConfigError("config key '" + key + "' is not a boolean: '" + raw + "'");
}

std::vector<double> KeyValueConfig::get_double_list(
    const std::string& section, const std::string& key) const {
  const std::string raw = get_string(section, key);
  std::vector<double> values;
  std::stringstream ss(raw);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) {
      throw ConfigError("config key '" + key + "' has an empty list item");
    }
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size() || used == 0) {
      throw ConfigError("config key '" + key + "' has a non-numeric item: '" +
                        item + "'");
    }
    values.push_back(value);
  }
  if (values.empty()) {
    throw ConfigError("config key '" + key + "' is an empty list");
  }
  return values;
}

void KeyValueConfig::set(const std::string& section, const std::string& key,
                         const std::string& value) {
  if (values_[section].count(key) == 0) {
    order_[section].push_back(key);
  }
  values_[section][key] = value;
}

std::vector<std::string> KeyValueConfig::sections() const {
  std::vector<std::string> names;
  for (const auto& [name, keys] : values_) names.push_back(name);
  return names;
}

std::vector<std::string> KeyValueConfig::keys(const std::string& section) const {
  const auto it = order_.find(section);
  return it == order_.end() ? std::vector<std::string>{} : it->second;
}

std::vector<std::pair<std::string, std::string>>
KeyValueConfig::canonical_items() const {
  std::vector<std::pair<std::string, std::string>> items;
  for (const auto& [section, kv] : values_) {  // std::map iterates sorted
    for (const auto& [key, value] : kv) {
      items.emplace_back(section.empty() ? key : section + "." + key, value);
    }
  }
  return items;
}

}  // namespace qmee::bench
