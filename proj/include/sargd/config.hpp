#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace sargd {

/// Flat `key = value` document. Values are bare words, numbers, quoted
/// strings, booleans or bracketed lists of those. `#` starts a comment and
/// `[section]` headers prefix the following keys as `section.key`.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(const std::string& text);
  static KeyValueConfig load(const std::string& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  std::uint64_t get_uint(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<std::string> get_list(const std::string& key,
                                    const std::vector<std::string>& fallback) const;

  std::vector<std::string> keys() const;

 private:
  std::map<std::string, std::vector<std::string>> values_;
  std::map<std::string, bool> is_list_;
};

}  // namespace sargd
