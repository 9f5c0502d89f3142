#pragma once

#include <map>
#include <optional>
#include <string>

namespace specgap {

// Plain-text run configuration: "[section]" headers with "key = value"
// lines; '#' starts a comment. Values are kept verbatim; numeric access
// parses on demand (fractions like 1/128 are accepted for grid spacings).
class Config {
 public:
  static Config load(const std::string& path);
  static Config parse_text(const std::string& text);

  bool has(const std::string& section, const std::string& key) const;
  std::string get(const std::string& section, const std::string& key) const;
  std::string get_or(const std::string& section, const std::string& key,
                     const std::string& fallback) const;
  double number(const std::string& section, const std::string& key) const;
  double number_or(const std::string& section, const std::string& key, double fallback) const;

  const std::map<std::string, std::map<std::string, std::string>>& sections() const {
    return data_;
  }

 private:
  std::map<std::string, std::map<std::string, std::string>> data_;
};

// "1/128" or "0.0078125" -> double; throws on malformed input.
double parse_number_or_fraction(const std::string& text);

}  // namespace specgap
