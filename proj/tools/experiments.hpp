#pragma once

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "config.hpp"

namespace boxplus::cli {

struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunOptions {
  std::filesystem::path out = "out";
  std::uint64_t seed = 1;
  int threads = 1;
  bool quiet = false;
};

// Every command resolves its configuration, writes manifest.json first and
// its artifacts after; on failure the partial outputs are removed.
void run_freeconv(Config& cfg, const RunOptions& opts);
void run_sample(Config& cfg, const RunOptions& opts);
void run_diffuse(Config& cfg, const RunOptions& opts);
void run_couple(Config& cfg, const RunOptions& opts);
void run_locallaw(Config& cfg, const RunOptions& opts);
void run_stats(Config& cfg, const RunOptions& opts);

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

// The acceptance suite; prints one pass/fail line per criterion to `log`.
std::vector<CriterionResult> run_acceptance(std::uint64_t seed, int threads, std::ostream& log);

// accept command: runs the suite, writes acceptance.json, returns the number
// of failed criteria.
int run_accept(Config& cfg, const RunOptions& opts);

}  // namespace boxplus::cli
