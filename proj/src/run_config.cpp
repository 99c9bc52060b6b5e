#include "dnaol/run_config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>

namespace dnaol {

namespace {

std::string trim(const std::string& s) {
  const std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  double v;
  const char* first = value.data();
  const char* last = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last)
    throw ConfigError("bad value for " + key + ": '" + value + "'");
  return v;
}

long parse_int(const std::string& key, const std::string& value) {
  long v;
  const char* first = value.data();
  const char* last = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last)
    throw ConfigError("bad value for " + key + ": '" + value + "'");
  return v;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "1" || value == "true" || value == "yes" || value == "on")
    return true;
  if (value == "0" || value == "false" || value == "no" || value == "off")
    return false;
  throw ConfigError("bad value for " + key + ": '" + value + "'");
}

}  // namespace

const std::vector<std::string>& RunConfig::known_keys() {
  static const std::vector<std::string> keys = {
      "alpha",      "tau",        "sigma2",     "rho",
      "epsilon",    "max_outer",  "warm_start", "inner_iterations",
      "residual_tol", "seed",     "scheme",     "feature_budget",
      "normalize",  "threads"};
  return keys;
}

void RunConfig::assign(const std::string& key, const std::string& value) {
  if (key == "alpha")
    hp.alpha = parse_double(key, value);
  else if (key == "tau")
    hp.tau = parse_double(key, value);
  else if (key == "sigma2")
    hp.sigma2 = parse_double(key, value);
  else if (key == "rho")
    hp.rho = parse_double(key, value);
  else if (key == "epsilon")
    hp.epsilon = parse_double(key, value);
  else if (key == "residual_tol")
    hp.residual_tol = parse_double(key, value);
  else if (key == "max_outer")
    hp.max_outer = static_cast<int>(parse_int(key, value));
  else if (key == "warm_start")
    hp.warm_start = static_cast<int>(parse_int(key, value));
  else if (key == "inner_iterations")
    hp.inner_iterations = static_cast<int>(parse_int(key, value));
  else if (key == "seed")
    hp.seed = static_cast<std::uint64_t>(parse_int(key, value));
  else if (key == "scheme") {
    if (value != "sep" && value != "nonsep")
      throw ConfigError("scheme must be 'sep' or 'nonsep', got '" + value + "'");
    scheme = value;
  } else if (key == "feature_budget")
    feature_budget = static_cast<int>(parse_int(key, value));
  else if (key == "normalize")
    normalize = parse_bool(key, value);
  else if (key == "threads")
    threads = static_cast<int>(parse_int(key, value));
  else
    throw ConfigError("unknown config key '" + key + "'");
  set_keys.insert(key);
}

void RunConfig::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(line_no) +
                        ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError(path + ":" + std::to_string(line_no) + ": empty key");
    assign(key, value);
  }
}

std::vector<std::string> RunConfig::defaulted_keys() const {
  std::vector<std::string> out;
  for (const std::string& k : known_keys())
    if (!was_set(k)) out.push_back(k);
  return out;
}

int RunConfig::resolve_threads() const {
  if (threads > 0) return threads;
  if (const char* env = std::getenv("DNAOL_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end && *end == '\0' && v > 0) return static_cast<int>(v);
  }
  return 1;
}

}  // namespace dnaol
