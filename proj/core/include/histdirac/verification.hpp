#pragma once

// Self-test suite behind `histdirac verify`: spinor identities, oracle
// comparisons, the positivity sweep and the lattice mass identities, each
// reported with the measured value, its threshold and the margin.

#include <cstdint>
#include <string>
#include <vector>

namespace histdirac::verify {

struct CheckResult {
  std::string name;
  std::string module;
  double value = 0.0;
  double threshold = 0.0;
  bool below = true;  ///< pass iff value < threshold (value > threshold when false)
  bool passed = false;
  double seconds = 0.0;
  std::string detail;

  /// Distance to the threshold on the passing side (negative on failure).
  double margin() const { return below ? threshold - value : value - threshold; }
};

struct Options {
  std::uint64_t seed = 20240611;
  int samples = 100;           ///< random samples for the spinor identities
  int positivity_samples = 10000;
  /// "" or "spinor_sign": builds S from the negated generator so that
  /// S^{-1} gamma S no longer matches Lambda gamma.
  std::string inject_fault;
};

struct Report {
  Options options;
  std::vector<CheckResult> checks;

  bool all_passed() const;
  std::vector<std::string> failures() const;
  /// Sorted-key JSON with one entry per check.
  std::string to_json() const;
};

/// Runs every check. Exceptions thrown inside a check are recorded as a
/// failure of that check.
Report run(const Options& opts = {});

}  // namespace histdirac::verify
