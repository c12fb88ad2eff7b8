#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace qmee::bench {

class ConfigError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Flat key-value experiment configuration.
///
/// Grammar (one setting per line):
///   key = value            # top-level key
///   [section]              # opens a table; one level only
///   key = value            # key inside the open table
///   # comment              '#' starts a comment anywhere
/// Values are free text up to the comment marker; lists are comma-separated.
/// Redefining a key within the same section is rejected.
class KeyValueConfig {
 public:
  static KeyValueConfig parse_file(const std::string& path);
  static KeyValueConfig parse_string(const std::string& text);

  bool has_section(const std::string& section) const;
  bool has(const std::string& section, const std::string& key) const;

  std::string get_string(const std::string& section, const std::string& key) const;
  std::string get_string_or(const std::string& section, const std::string& key,
                            const std::string& fallback) const;
  double get_double(const std::string& section, const std::string& key) const;
  double get_double_or(const std::string& section, const std::string& key,
                       double fallback) const;
  std::int64_t get_int(const std::string& section, const std::string& key) const;
  std::int64_t get_int_or(const std::string& section, const std::string& key,
                          std::int64_t fallback) const;
  std::uint64_t get_uint64_or(const std::string& section, const std::string& key,
                              std::uint64_t fallback) const;
  bool get_bool_or(const std::string& section, const std::string& key,
                   bool fallback) const;
  std::vector<double> get_double_list(const std::string& section,
                                      const std::string& key) const;

  void set(const std::string& section, const std::string& key,
           const std::string& value);

  std::vector<std::string> sections() const;
  /// Keys of a section in insertion order.
  std::vector<std::string> keys(const std::string& section) const;

  /// Canonical one-line-per-key rendering (sections sorted, keys sorted) used
  /// to embed the fully resolved configuration in report headers.
  std::vector<std::pair<std::string, std::string>> canonical_items() const;

 private:
  // section -> key -> value, with insertion order tracked separately
  std::map<std::string, std::map<std::string, std::string>> values_;
  std::map<std::string, std::vector<std::string>> order_;
};

}  // namespace qmee::bench
