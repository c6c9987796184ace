#include <algorithm>
#include <cmath>
#include <map>

#include "check_util.hpp"
#include "covertree/errors.hpp"

namespace covertree {

namespace {

nlohmann::json number_or_null(double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(); }

}  // namespace

bool SuiteResult::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass || c.informational; });
}

nlohmann::json SuiteResult::to_json() const {
  nlohmann::json j;
  j["suite"] = suite;
  j["pass"] = pass();
  j["seconds"] = seconds;
  j["checks"] = nlohmann::json::array();
  for (const auto& c : checks) {
    nlohmann::json e{{"name", c.name},
                     {"pass", c.pass},
                     {"observed", number_or_null(c.observed)},
                     {"expected", number_or_null(c.expected)},
                     {"tolerance", number_or_null(c.tolerance)},
                     {"rule", c.rule}};
    if (c.informational) e["informational"] = true;
    if (!c.extra.empty()) e["extra"] = c.extra;
    j["checks"].push_back(std::move(e));
  }
  return j;
}

std::uint64_t CheckOptions::scaled(std::uint64_t base) const {
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::llround(static_cast<double>(base) * scale)));
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{
      "identities", "moments",   "chain-equivalence", "covariance-oracle", "bridge",  "besq",
      "girsanov",   "martingale", "limit-law",        "barrier",           "alpha",   "reproducibility"};
  return names;
}

SuiteResult run_suite(const std::string& name, const CheckOptions& opt) {
  using Fn = SuiteResult (*)(const CheckOptions&);
  static const std::map<std::string, Fn> table{
      {"identities", check_identities},     {"moments", check_moments},
      {"chain-equivalence", check_chain_equivalence}, {"covariance-oracle", check_covariance_oracle},
      {"bridge", check_bridge},             {"besq", check_besq},
      {"girsanov", check_girsanov},         {"martingale", check_martingale},
      {"limit-law", check_limit_law},       {"barrier", check_barrier},
      {"alpha", check_alpha},               {"reproducibility", check_reproducibility}};
  const auto it = table.find(name);
  if (it == table.end()) throw DomainError("unknown check suite '" + name + "'");
  detail::Stopwatch clock;
  SuiteResult r = it->second(opt);
  r.suite = name;
  r.seconds = clock.seconds();
  return r;
}

namespace detail {

CheckResult sigma_check(std::string name, const RunningStats& s, double expected, double k) {
  return sigma_check(std::move(name), s.mean(), s.std_error(), expected, k);
}

CheckResult sigma_check(std::string name, double observed, double se, double expected, double k) {
  CheckResult c;
  c.name = std::move(name);
  c.observed = observed;
  c.expected = expected;
  c.tolerance = k * se;
  c.pass = std::fabs(observed - expected) <= c.tolerance;
  c.rule = "|observed - expected| <= " + std::to_string(k).substr(0, 4) + " sigma";
  c.extra["std_error"] = se;
  c.extra["z"] = se > 0 ? (observed - expected) / se : 0.0;
  return c;
}

CheckResult two_sample_check(std::string name, double a, double se_a, double b, double se_b, double k) {
  const double se = std::hypot(se_a, se_b);
  CheckResult c = sigma_check(std::move(name), a, se, b, k);
  c.rule = "|a - b| <= " + std::to_string(k).substr(0, 4) + " joint sigma";
  c.extra["std_error_a"] = se_a;
  c.extra["std_error_b"] = se_b;
  return c;
}

CheckResult relative_check(std::string name, double observed, double expected, double rel) {
  CheckResult c;
  c.name = std::move(name);
  c.observed = observed;
  c.expected = expected;
  c.tolerance = rel * std::fabs(expected);
  c.pass = std::fabs(observed - expected) <= c.tolerance;
  c.rule = "relative error <= " + std::to_string(rel);
  return c;
}

CheckResult at_most(std::string name, double observed, double limit) {
  CheckResult c;
  c.name = std::move(name);
  c.observed = observed;
  c.expected = limit;
  c.tolerance = 0.0;
  c.pass = observed <= limit;
  c.rule = "observed <= expected";
  return c;
}

CheckResult at_least(std::string name, double observed, double limit) {
  CheckResult c = at_most(std::move(name), observed, limit);
  c.pass = observed >= limit;
  c.rule = "observed >= expected";
  return c;
}

CheckResult in_range(std::string name, double observed, double lo, double hi) {
  CheckResult c;
  c.name = std::move(name);
  c.observed = observed;
  c.expected = 0.5 * (lo + hi);
  c.tolerance = 0.5 * (hi - lo);
  c.pass = lo <= observed && observed <= hi;
  c.rule = "observed in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]";
  return c;
}

}  // namespace detail

}  // namespace covertree
