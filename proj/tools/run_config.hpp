#pragma once

// Flat dotted key/value configuration for the command-line tool.
//
//   # comment
//   density.eps = 1e-3
//   purity.eps_m = 0.1, 1, 10
//
// Every key has a default; unknown keys are rejected so that typos do not
// silently fall back to defaults.

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace histdirac::cli {

class RunConfig {
 public:
  RunConfig();  ///< all defaults

  /// Parses `text` on top of the current values. Throws ConfigError with the
  /// line number on malformed input or unknown keys.
  void merge_text(const std::string& text, const std::string& origin = "<string>");
  /// "key=value" as given to --set.
  void set(const std::string& assignment);

  std::string get(const std::string& key) const;
  double number(const std::string& key) const;
  int integer(const std::string& key) const;
  bool flag(const std::string& key) const;
  std::vector<double> numbers(const std::string& key) const;

  /// Checks the physical parameters of `command`: masses, widths and eps
  /// positive, velocities in [0, 1). Throws ConfigError.
  void validate(const std::string& command) const;

  /// Sorted `key = value` lines, readable by merge_text.
  std::string resolved() const;
  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace histdirac::cli
