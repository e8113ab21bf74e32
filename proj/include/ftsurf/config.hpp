#ifndef FTSURF_CONFIG_HPP
#define FTSURF_CONFIG_HPP

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

// Strict INI-style experiment configuration. Every key must be consumed by
// the loader — unknown sections or keys fail with their line number — and
// parse errors name the offending line. A 64-bit FNV-1a hash over the
// canonicalized contents identifies the configuration in logs and
// checkpoints.

namespace ftsurf {

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ConfigEntry {
  std::string value;
  int line = 0;
  mutable bool consumed = false;
};

class ConfigFile {
 public:
  static ConfigFile parse_file(const std::string& path);
  static ConfigFile parse_string(const std::string& text, const std::string& origin);

  bool has(const std::string& section, const std::string& key) const;

  // Typed getters mark the key consumed; the *_or forms fall back to a
  // default when the key is absent. Malformed values raise ConfigError with
  // the file and line.
  std::string get_string(const std::string& section, const std::string& key) const;
  std::string get_string_or(const std::string& section, const std::string& key,
                            const std::string& fallback) const;
  double get_double(const std::string& section, const std::string& key) const;
  double get_double_or(const std::string& section, const std::string& key,
                       double fallback) const;
  long get_int(const std::string& section, const std::string& key) const;
  long get_int_or(const std::string& section, const std::string& key, long fallback) const;
  bool get_bool_or(const std::string& section, const std::string& key, bool fallback) const;
  std::vector<double> get_doubles(const std::string& section, const std::string& key) const;

  // Throws listing every key that no getter touched.
  void reject_unconsumed() const;

  // FNV-1a over "section\x1fkey\x1fvalue\x1e" in sorted order; comments and
  // formatting do not affect it.
  std::uint64_t content_hash() const;
  std::string content_hash_hex() const;

  const std::string& origin() const { return origin_; }

 private:
  const ConfigEntry* find(const std::string& section, const std::string& key) const;
  [[noreturn]] void fail_missing(const std::string& section, const std::string& key) const;

  std::string origin_;
  std::map<std::string, std::map<std::string, ConfigEntry>> sections_;
};

}  // namespace ftsurf

#endif
