#include "amgd/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "amgd/error.hpp"

namespace amgd {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::string token;
  std::istringstream in(s);
  while (std::getline(in, token, ',')) out.push_back(trim(token));
  return out;
}

}  // namespace

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= static_cast<std::uint64_t>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

ExperimentConfig ExperimentConfig::parse(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash_pos = line.find('#');
    if (hash_pos != std::string::npos) line = line.substr(0, hash_pos);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw Error("BadConstants",
                  "config line " + std::to_string(line_no) + " is not key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw Error("BadConstants",
                  "config line " + std::to_string(line_no) + " has an empty key");
    cfg.values_[key] = value;
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("IoFailure", "cannot open config file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  values_[key] = value;
}

bool ExperimentConfig::has(const std::string& key) const {
  return values_.count(key) != 0;
}

std::string ExperimentConfig::get_string(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end())
    throw Error("BadConstants", "missing required config key '" + key + "'");
  return it->second;
}

std::string ExperimentConfig::get_string(const std::string& key,
                                         const std::string& fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double ExperimentConfig::get_double(const std::string& key) const {
  const std::string raw = get_string(key);
  double v = 0.0;
  const char* begin = raw.data();
  const char* end = raw.data() + raw.size();
  auto res = std::from_chars(begin, end, v);
  if (res.ec != std::errc() || res.ptr != end)
    throw Error("BadConstants", "config key '" + key + "' is not a number: " + raw);
  return v;
}

double ExperimentConfig::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

long ExperimentConfig::get_long(const std::string& key) const {
  const std::string raw = get_string(key);
  long v = 0;
  const char* begin = raw.data();
  const char* end = raw.data() + raw.size();
  auto res = std::from_chars(begin, end, v);
  if (res.ec != std::errc() || res.ptr != end)
    throw Error("BadConstants", "config key '" + key + "' is not an integer: " + raw);
  return v;
}

long ExperimentConfig::get_long(const std::string& key, long fallback) const {
  return has(key) ? get_long(key) : fallback;
}

bool ExperimentConfig::get_bool(const std::string& key) const {
  const std::string raw = get_string(key);
  if (raw == "true" || raw == "1" || raw == "yes") return true;
  if (raw == "false" || raw == "0" || raw == "no") return false;
  throw Error("BadConstants", "config key '" + key + "' is not a boolean: " + raw);
}

bool ExperimentConfig::get_bool(const std::string& key, bool fallback) const {
  return has(key) ? get_bool(key) : fallback;
}

std::vector<std::uint64_t> ExperimentConfig::get_seeds(const std::string& key) const {
  const std::string raw = get_string(key);
  std::vector<std::uint64_t> out;
  for (const std::string& token : split_commas(raw)) {
    if (token.empty())
      throw Error("BadConstants", "config key '" + key + "' has an empty seed entry");
    std::uint64_t v = 0;
    const char* begin = token.data();
    const char* end = token.data() + token.size();
    auto res = std::from_chars(begin, end, v);
    if (res.ec != std::errc() || res.ptr != end)
      throw Error("BadConstants", "config key '" + key + "' has a bad seed: " + token);
    out.push_back(v);
  }
  if (out.empty())
    throw Error("BadConstants", "config key '" + key + "' lists no seeds");
  std::set<std::uint64_t> uniq(out.begin(), out.end());
  if (uniq.size() != out.size())
    throw Error("BadConstants", "config key '" + key + "' has duplicate seeds");
  return out;
}

std::vector<long> ExperimentConfig::get_long_list(const std::string& key) const {
  const std::string raw = get_string(key);
  std::vector<long> out;
  for (const std::string& token : split_commas(raw)) {
    if (token.empty())
      throw Error("BadConstants", "config key '" + key + "' has an empty entry");
    long v = 0;
    const char* begin = token.data();
    const char* end = token.data() + token.size();
    auto res = std::from_chars(begin, end, v);
    if (res.ec != std::errc() || res.ptr != end)
      throw Error("BadConstants", "config key '" + key + "' has a bad entry: " + token);
    out.push_back(v);
  }
  if (out.empty())
    throw Error("BadConstants", "config key '" + key + "' lists no entries");
  return out;
}

std::string ExperimentConfig::canonical_text() const {
  std::ostringstream out;
  for (const auto& [key, value] : values_) out << key << '=' << value << '\n';
  return out.str();
}

std::string ExperimentConfig::hash() const {
  const std::uint64_t h = fnv1a64(canonical_text());
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace amgd
