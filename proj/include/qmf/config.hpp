#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace qmf {

/// Flat key-value configuration with optional [section] headers. Keys are
/// stored as "section.key". Lines starting with '#' or ';' are comments.
class Config {
 public:
  static Config parse(std::string_view text);
  static Config load(const std::string& path);

  bool has(const std::string& key) const;
  void set(const std::string& key, const std::string& value);

  std::string get(const std::string& key) const;
  std::string get(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  long long get_int(const std::string& key, long long fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  /// Comma or whitespace separated numbers.
  std::vector<double> get_list(const std::string& key) const;

  /// Entries in first-appearance order.
  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }
  /// Sorted "key=value" lines; the hash is taken over this text.
  std::string canonical() const;
  std::uint64_t hash() const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

std::uint64_t fnv1a64(std::string_view data);
std::string hex64(std::uint64_t v);

}  // namespace qmf
