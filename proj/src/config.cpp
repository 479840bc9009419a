#include "fracsheet/config.hpp"

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <set>

namespace fracsheet::cli {

namespace {

double parse_real(const std::string& key, const std::string& value) {
  errno = 0;
  char* end = nullptr;
  double x = std::strtod(value.c_str(), &end);
  if (end == value.c_str() || *end != '\0' || errno == ERANGE)
    throw config_error("config: key '" + key + "' needs a real number, got '" +
                       value + "'");
  return x;
}

long long parse_int(const std::string& key, const std::string& value) {
  errno = 0;
  char* end = nullptr;
  long long x = std::strtoll(value.c_str(), &end, 10);
  if (end == value.c_str() || *end != '\0' || errno == ERANGE)
    throw config_error("config: key '" + key + "' needs an integer, got '" +
                       value + "'");
  return x;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  errno = 0;
  char* end = nullptr;
  unsigned long long x = std::strtoull(value.c_str(), &end, 10);
  if (end == value.c_str() || *end != '\0' || errno == ERANGE ||
      value.find('-') != std::string::npos)
    throw config_error("config: key '" + key +
                       "' needs an unsigned integer, got '" + value + "'");
  return x;
}

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

void apply_kv(RunConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "T")
    cfg.T = parse_real(key, value);
  else if (key == "grid")
    cfg.grid = static_cast<int>(parse_int(key, value));
  else if (key == "lo_alpha")
    cfg.lo.alpha = parse_real(key, value);
  else if (key == "lo_beta")
    cfg.lo.beta = parse_real(key, value);
  else if (key == "hi_alpha")
    cfg.hi.alpha = parse_real(key, value);
  else if (key == "hi_beta")
    cfg.hi.beta = parse_real(key, value);
  else if (key == "drift")
    cfg.drift = value;
  else if (key == "drift_c")
    cfg.drift_c = parse_real(key, value);
  else if (key == "x0")
    cfg.x0 = parse_real(key, value);
  else if (key == "paths")
    cfg.paths = static_cast<long>(parse_int(key, value));
  else if (key == "seed")
    cfg.seed = parse_u64(key, value);
  else if (key == "truncation_N")
    cfg.truncation_N = static_cast<int>(parse_int(key, value));
  else if (key == "tol")
    cfg.tol = parse_real(key, value);
  else if (key == "max_iter")
    cfg.max_iter = static_cast<int>(parse_int(key, value));
  else if (key == "rho")
    cfg.rho = parse_real(key, value);
  else if (key == "window")
    cfg.window = parse_real(key, value);
  else if (key == "out")
    cfg.out_dir = value;
  else if (key == "workers")
    cfg.workers = static_cast<int>(parse_int(key, value));
  else if (key == "quiet")
    cfg.quiet = value == "1" || value == "true";
  else
    throw config_error("config: unknown key '" + key + "'");
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("config: cannot read '" + path + "'");
  RunConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw config_error("config: line " + std::to_string(lineno) + " of '" +
                         path + "' is not key=value");
    apply_kv(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

void validate(const RunConfig& cfg) {
  if (!(cfg.T > 0.0)) throw config_error("config: T must be positive");
  if (cfg.grid < 2) throw config_error("config: grid needs at least 2 nodes");
  auto hurst_ok = [](HurstPair hp) {
    return hp.alpha > 0.0 && hp.alpha <= 0.5 && hp.beta > 0.0 && hp.beta <= 0.5;
  };
  if (!hurst_ok(cfg.lo) || !hurst_ok(cfg.hi))
    throw config_error("config: Hurst components must lie in (0, 1/2]");
  if (!strictly_ordered(cfg.lo, cfg.hi))
    throw config_error(
        "config: the pairs must satisfy the strict ordering lo ≺ hi "
        "(lo_alpha < hi_alpha and lo_beta < hi_beta)");
  static const std::set<std::string> kDrifts{"zero", "const", "arctan", "cos",
                                             "linear"};
  if (!kDrifts.count(cfg.drift))
    throw config_error("config: drift must be one of zero|const|arctan|cos|linear");
  if (cfg.paths < 0) throw config_error("config: paths must be >= 0");
  if (cfg.truncation_N < 0)
    throw config_error("config: truncation_N must be >= 0");
  if (!(cfg.tol > 0.0)) throw config_error("config: tol must be positive");
  if (cfg.max_iter < 1) throw config_error("config: max_iter must be >= 1");
  if (!(cfg.rho > 1.0)) throw config_error("config: rho must exceed 1");
  if (cfg.window < 0.0) throw config_error("config: window must be >= 0");
  if (cfg.workers < 0) throw config_error("config: workers must be >= 0");
  if (cfg.out_dir.empty()) throw config_error("config: out must be non-empty");
}

}  // namespace fracsheet::cli
