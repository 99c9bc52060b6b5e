#pragma once

#include <set>
#include <string>
#include <vector>

#include "dnaol/train.hpp"

namespace dnaol {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

//! Hyperparameters plus run-level knobs shared by the CLI subcommands.
//! Precedence: built-in defaults < config file < command-line flags.
struct RunConfig {
  HyperParams hp;
  std::string scheme = "sep";  // "sep" or "nonsep"
  int feature_budget = 40;
  bool normalize = true;
  int threads = 0;  // 0: DNAOL_THREADS env var, else 1

  std::set<std::string> set_keys;  // keys assigned by file or flag

  bool was_set(const std::string& key) const { return set_keys.count(key) > 0; }

  //! Apply one key=value assignment; unknown keys or unparsable values
  //! raise ConfigError.
  void assign(const std::string& key, const std::string& value);

  //! Load a key=value file ('#' comments and blank lines allowed).
  void load_file(const std::string& path);

  //! Keys that still hold built-in defaults, for the startup notice.
  std::vector<std::string> defaulted_keys() const;

  //! Resolve the worker count: explicit threads, else DNAOL_THREADS, else 1.
  int resolve_threads() const;

  static const std::vector<std::string>& known_keys();
};

}  // namespace dnaol
