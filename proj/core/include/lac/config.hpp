#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace lac {

/// `key = value` configuration with `#` comments. Only keys from the known
/// set are accepted, both in files and in command-line overrides.
class Config {
 public:
  Config();

  static Config from_file(const std::string& path);

  /// Applies a "key=value" override string.
  void set(const std::string& assignment);
  void set(const std::string& key, const std::string& value);

  std::string get_string(const std::string& key) const;
  double get_double(const std::string& key) const;
  std::size_t get_size(const std::string& key) const;
  std::uint64_t get_u64(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  bool has(const std::string& key) const;

  const std::map<std::string, std::string>& entries() const { return values_; }

  static const std::vector<std::string>& known_keys();

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace lac
