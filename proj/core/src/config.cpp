#include "ltr/config.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "ltr/error.hpp"
#include "ltr/rng.hpp"

namespace ltr {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

KeyValueConfig KeyValueConfig::parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_string(buf.str());
  } catch (const ParseError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

KeyValueConfig KeyValueConfig::parse_string(std::string_view text) {
  KeyValueConfig cfg;
  int line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    std::string_view line = text.substr(
        start, end == std::string_view::npos ? text.size() - start : end - start);
    ++line_no;
    start = end == std::string_view::npos ? text.size() + 1 : end + 1;

    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    std::size_t eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ParseError("expected 'key = value'", line_no);
    std::string_view key = trim(line.substr(0, eq));
    std::string_view value = trim(line.substr(eq + 1));
    if (key.empty()) throw ParseError("empty key", line_no);
    cfg.set(key, value);
  }
  return cfg;
}

bool KeyValueConfig::has(std::string_view key) const {
  return values_.find(key) != values_.end();
}

std::string KeyValueConfig::get_string(std::string_view key,
                                       std::string_view def) const {
  auto it = values_.find(key);
  return it == values_.end() ? std::string(def) : it->second;
}

long long KeyValueConfig::get_int(std::string_view key, long long def) const {
  auto it = values_.find(key);
  if (it == values_.end()) return def;
  const char* s = it->second.c_str();
  char* endp = nullptr;
  long long v = std::strtoll(s, &endp, 10);
  if (endp == s || *endp != '\0')
    throw ConfigError("config key '" + std::string(key) + "' is not an integer: " + it->second);
  return v;
}

double KeyValueConfig::get_double(std::string_view key, double def) const {
  auto it = values_.find(key);
  if (it == values_.end()) return def;
  const char* s = it->second.c_str();
  char* endp = nullptr;
  double v = std::strtod(s, &endp);
  if (endp == s || *endp != '\0')
    throw ConfigError("config key '" + std::string(key) + "' is not a number: " + it->second);
  return v;
}

bool KeyValueConfig::get_bool(std::string_view key, bool def) const {
  auto it = values_.find(key);
  if (it == values_.end()) return def;
  const std::string& v = it->second;
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("config key '" + std::string(key) + "' is not a boolean: " + v);
}

void KeyValueConfig::set(std::string_view key, std::string_view value) {
  values_[std::string(key)] = std::string(value);
}

std::string KeyValueConfig::canonical() const {
  std::string out;
  for (const auto& [k, v] : values_) {
    out += k;
    out += " = ";
    out += v;
    out += '\n';
  }
  return out;
}

std::uint64_t KeyValueConfig::fingerprint() const { return fnv1a64(canonical()); }

std::string KeyValueConfig::fingerprint_hex() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fingerprint()));
  return buf;
}

}  // namespace ltr
