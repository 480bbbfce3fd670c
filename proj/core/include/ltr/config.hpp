#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>

namespace ltr {

// Flat "key = value" configuration. Lines starting with '#' are comments.
class KeyValueConfig {
 public:
  KeyValueConfig() = default;

  static KeyValueConfig parse_file(const std::filesystem::path& path);
  static KeyValueConfig parse_string(std::string_view text);

  bool has(std::string_view key) const;
  std::string get_string(std::string_view key, std::string_view def) const;
  long long get_int(std::string_view key, long long def) const;
  double get_double(std::string_view key, double def) const;
  bool get_bool(std::string_view key, bool def) const;

  void set(std::string_view key, std::string_view value);

  // Sorted "key = value" lines; the fingerprint hashes this form so that key
  // order in the source file does not matter.
  std::string canonical() const;
  std::uint64_t fingerprint() const;
  std::string fingerprint_hex() const;

  const std::map<std::string, std::string, std::less<>>& values() const {
    return values_;
  }

 private:
  std::map<std::string, std::string, std::less<>> values_;
};

}  // namespace ltr
