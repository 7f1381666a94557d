#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <stdexcept>
#include <string>

#include "boxplus/measure.hpp"

namespace boxplus::cli {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flat sectioned key=value text. `#` starts a comment, sections are
// `[name]`, keys inside a section are addressed as `section.key`. Unknown
// keys are errors: every key a run does not consume is reported with its
// line number.
class Config {
 public:
  Config() = default;
  static Config from_file(const std::filesystem::path& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }

  std::string get_string(const std::string& key, const std::string& fallback);
  double get_double(const std::string& key, double fallback);
  int get_int(const std::string& key, int fallback);
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback);
  bool get_bool(const std::string& key, bool fallback);

  // every key must have been consumed by a get_* call
  void assert_fully_consumed() const;

  // resolved view (post-defaults) assembled by the callers for the manifest
  const std::map<std::string, std::string>& raw() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
  std::map<std::string, int> lines_;
  std::set<std::string> consumed_;
};

// Measure specs: semicircle:VAR | uniform:A:B | dirac:A | two_point:A |
// arcsine:A | file:PATH
Measure parse_measure(const std::string& spec);

}  // namespace boxplus::cli
