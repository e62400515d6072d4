#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace helmscat {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Flat "key = value" document. '#' starts a comment; blank lines are skipped.
/// Unknown and repeated keys are errors.
class RunConfig {
 public:
  static RunConfig parse(std::string_view text);
  static RunConfig load(const std::filesystem::path& path);

  /// Every key the toolkit understands.
  static const std::vector<std::string>& known_keys();

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  const std::string& text(const std::string& key) const;
  std::string text_or(const std::string& key, const std::string& fallback) const;
  double number(const std::string& key) const;
  double number_or(const std::string& key, double fallback) const;
  int integer(const std::string& key) const;
  int integer_or(const std::string& key, int fallback) const;
  std::uint64_t unsigned_or(const std::string& key, std::uint64_t fallback) const;
  bool flag_or(const std::string& key, bool fallback) const;
  std::vector<double> numbers_or(const std::string& key, std::vector<double> fallback) const;
  std::vector<std::string> words_or(const std::string& key,
                                    std::vector<std::string> fallback) const;

  /// Relative paths resolve against the directory of the loaded file.
  std::filesystem::path path(const std::string& key) const;
  void set(const std::string& key, std::string value);

 private:
  std::map<std::string, std::string> values_;
  std::filesystem::path base_dir_ = ".";
};

}  // namespace helmscat
