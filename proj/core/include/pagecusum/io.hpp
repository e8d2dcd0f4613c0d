#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace pagecusum {

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double value);
/// Strict parse of a full string as a double; throws ValidationError.
double parse_double(std::string_view text, std::string_view what = "value");
long long parse_integer(std::string_view text, std::string_view what = "value");

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& content);

/// Single-column CSV of decimal values with an optional header line `x`.
std::vector<double> read_value_column(const std::filesystem::path& path);
std::string format_value_column(const std::vector<double>& values);

/// Flat `key=value` file: blank lines and lines starting with '#' are ignored.
/// Keys outside `allowed` and duplicate keys are rejected.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(std::string_view text, const std::set<std::string>& allowed);
  static KeyValueConfig load(const std::filesystem::path& path, const std::set<std::string>& allowed);

  bool has(const std::string& key) const { return values_.contains(key); }
  std::optional<std::string> get(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  std::optional<double> get_double(const std::string& key) const;
  long long get_integer(const std::string& key, long long fallback) const;
  std::optional<long long> get_integer(const std::string& key) const;
  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace pagecusum
