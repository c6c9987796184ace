#pragma once

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>

#include "covertree/checks.hpp"
#include "covertree/mc_stats.hpp"
#include "covertree/parallel.hpp"
#include "covertree/rng.hpp"

namespace covertree::detail {

/// |mean - expected| <= k * standard error.
CheckResult sigma_check(std::string name, const RunningStats& s, double expected, double k);
/// Same with an explicit estimate and standard error.
CheckResult sigma_check(std::string name, double observed, double se, double expected, double k);
/// |a - b| <= k * sqrt(se_a^2 + se_b^2).
CheckResult two_sample_check(std::string name, double a, double se_a, double b, double se_b, double k);
/// |observed - expected| <= rel * |expected|.
CheckResult relative_check(std::string name, double observed, double expected, double rel);
/// observed <= limit.
CheckResult at_most(std::string name, double observed, double limit);
/// observed >= limit.
CheckResult at_least(std::string name, double observed, double limit);
/// lo <= observed <= hi.
CheckResult in_range(std::string name, double observed, double lo, double hi);

/// Stream for chunk c of a suite; independent of the worker count.
inline Rng chunk_stream(const CheckOptions& opt, std::string_view tag, std::uint64_t c,
                        std::uint64_t extra = 0) {
  return make_stream(opt.seed, stream_id(tag, c, extra));
}

/// Splits `total` items into `chunks` nearly equal parts; part c has size(c) items.
struct Split {
  std::uint64_t total;
  std::uint64_t chunks;
  std::uint64_t size(std::uint64_t c) const { return total / chunks + (c < total % chunks ? 1 : 0); }
};

inline std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

inline void progress(const CheckOptions& opt, const std::string& msg) {
  if (opt.progress) opt.progress(msg);
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

}  // namespace covertree::detail
