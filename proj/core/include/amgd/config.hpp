#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace amgd {

// Flat key=value experiment configuration. Keys are kept in sorted order so
// the canonical rendering (and hence the hash) is independent of insertion
// or file order. '#' starts a comment; blank lines are ignored.
class ExperimentConfig {
 public:
  ExperimentConfig() = default;

  static ExperimentConfig parse(const std::string& text);
  static ExperimentConfig load(const std::string& path);

  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const;

  // Throws BadConstants when the key is missing or the value does not parse.
  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  long get_long(const std::string& key) const;
  long get_long(const std::string& key, long fallback) const;
  bool get_bool(const std::string& key) const;
  bool get_bool(const std::string& key, bool fallback) const;

  // Comma-separated unsigned integers; must be nonempty and distinct.
  std::vector<std::uint64_t> get_seeds(const std::string& key) const;
  std::vector<long> get_long_list(const std::string& key) const;

  // Sorted "key=value\n" rendering used for hashing and round-trips.
  std::string canonical_text() const;
  // FNV-1a 64-bit hash of the canonical text, as 16 lowercase hex digits.
  std::string hash() const;

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

// FNV-1a 64-bit over raw bytes.
std::uint64_t fnv1a64(const std::string& bytes);

}  // namespace amgd
