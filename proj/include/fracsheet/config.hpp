#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "fracsheet/core.hpp"

namespace fracsheet::cli {

// Invalid configuration, unknown keys, or an unusable input/output
// environment. Mapped to the command-line exit code 2.
struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One validated experiment description shared by all subcommands. File keys
// carry the same names as the fields (lo/hi pairs split into lo_alpha,
// lo_beta, hi_alpha, hi_beta).
struct RunConfig {
  double T = 1.0;
  int grid = 17;
  HurstPair lo{0.2, 0.2};
  HurstPair hi{0.5, 0.5};
  std::string drift = "cos";  // zero | const | arctan | cos | linear
  double drift_c = 1.0;
  double x0 = 0.1;
  long paths = 200;
  std::uint64_t seed = 1;
  int truncation_N = 50;
  double tol = 1e-10;
  int max_iter = 200;
  double rho = 3.0;     // occupation-estimate norm exponent
  double window = 1.0;  // occupation window halfwidth around x0
  std::string out_dir = ".";
  int workers = 0;  // 0: defer to FRACSHEET_THREADS, else 1
  bool quiet = false;
};

// Applies `key=value`; throws config_error on unknown keys or unparseable
// values. Used by both the file loader and flag overrides.
void apply_kv(RunConfig& cfg, const std::string& key, const std::string& value);

// Flat key=value file, one pair per line; '#' starts a comment; blank lines
// ignored. Throws config_error when the file cannot be read.
RunConfig load_config(const std::string& path);

// Range and ordering checks over the full struct (strict lo < hi ordering in
// both Hurst components, drift name known, positive sizes). Throws
// config_error with a message naming the offending requirement.
void validate(const RunConfig& cfg);

}  // namespace fracsheet::cli
