#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"

#include "covertree/run_config.hpp"

namespace covertree {

/// One verdict: observed against expected with the tolerance that was applied.
struct CheckResult {
  std::string name;
  bool pass = false;
  /// Diagnostics are reported but do not decide the suite.
  bool informational = false;
  double observed = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  std::string rule;  ///< how observed, expected and tolerance were compared
  nlohmann::json extra = nlohmann::json::object();
};

struct SuiteResult {
  std::string suite;
  std::vector<CheckResult> checks;
  double seconds = 0.0;
  bool pass() const;
  nlohmann::json to_json() const;
};

struct CheckOptions {
  std::uint64_t seed = 20240601;
  unsigned workers = 1;
  /// Multiplies Monte Carlo sample sizes (1 = the documented sizes).
  double scale = 1.0;
  Thresholds thresholds;
  /// Deepest tree for the X' identity sweep in the identities suite.
  int identity_depth = 12;
  /// Single excursions in the moments suite.
  std::uint64_t excursions = 1'000'000;
  /// Deepest level j in the moments suite.
  int moment_depth = 12;
  std::function<void(const std::string&)> progress;

  std::uint64_t scaled(std::uint64_t base) const;
};

/// Names accepted by run_suite, in a fixed order.
const std::vector<std::string>& suite_names();

/// Throws DomainError for an unknown name.
SuiteResult run_suite(const std::string& name, const CheckOptions& opt);

SuiteResult check_identities(const CheckOptions& opt);
SuiteResult check_moments(const CheckOptions& opt);
SuiteResult check_chain_equivalence(const CheckOptions& opt);
SuiteResult check_covariance_oracle(const CheckOptions& opt);
SuiteResult check_bridge(const CheckOptions& opt);
SuiteResult check_besq(const CheckOptions& opt);
SuiteResult check_girsanov(const CheckOptions& opt);
SuiteResult check_martingale(const CheckOptions& opt);
SuiteResult check_limit_law(const CheckOptions& opt);
SuiteResult check_barrier(const CheckOptions& opt);
SuiteResult check_alpha(const CheckOptions& opt);
SuiteResult check_reproducibility(const CheckOptions& opt);

}  // namespace covertree
