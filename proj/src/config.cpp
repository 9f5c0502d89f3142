#include "specgap/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace specgap {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_text(ss.str());
}

Config Config::parse_text(const std::string& text) {
  Config c;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw std::runtime_error("config line " + std::to_string(lineno) + ": unterminated section");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw std::runtime_error("config line " + std::to_string(lineno) + ": empty key");
    c.data_[section][key] = value;
  }
  return c;
}

bool Config::has(const std::string& section, const std::string& key) const {
  const auto s = data_.find(section);
  return s != data_.end() && s->second.count(key) > 0;
}

std::string Config::get(const std::string& section, const std::string& key) const {
  const auto s = data_.find(section);
  if (s == data_.end() || !s->second.count(key))
    throw std::runtime_error("config: missing [" + section + "] " + key);
  return s->second.at(key);
}

std::string Config::get_or(const std::string& section, const std::string& key,
                           const std::string& fallback) const {
  return has(section, key) ? get(section, key) : fallback;
}

double Config::number(const std::string& section, const std::string& key) const {
  return parse_number_or_fraction(get(section, key));
}

double Config::number_or(const std::string& section, const std::string& key,
                         double fallback) const {
  return has(section, key) ? number(section, key) : fallback;
}

double parse_number_or_fraction(const std::string& text) {
  const std::string s = trim(text);
  const auto slash = s.find('/');
  size_t used = 0;
  if (slash == std::string::npos) {
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::runtime_error("malformed number: " + s);
    return v;
  }
  const std::string num_s = trim(s.substr(0, slash));
  const double num = std::stod(num_s, &used);
  if (used != num_s.size()) throw std::runtime_error("malformed fraction: " + s);
  const std::string den_s = trim(s.substr(slash + 1));
  const double den = std::stod(den_s, &used);
  if (used != den_s.size() || den == 0) throw std::runtime_error("malformed fraction: " + s);
  return num / den;
}

}  // namespace specgap
