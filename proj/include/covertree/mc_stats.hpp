#pragma once

#include <cmath>
#include <cstdint>
#include <span>

namespace covertree {

/// Welford accumulator for mean and variance.
class RunningStats {
 public:
  void add(double x) {
    ++n_;
    const double d = x - mean_;
    mean_ += d / static_cast<double>(n_);
    m2_ += d * (x - mean_);
  }

  /// Chan et al. parallel merge.
  void merge(const RunningStats& o) {
    if (o.n_ == 0) return;
    if (n_ == 0) {
      *this = o;
      return;
    }
    const double n = static_cast<double>(n_ + o.n_);
    const double d = o.mean_ - mean_;
    mean_ += d * static_cast<double>(o.n_) / n;
    m2_ += o.m2_ + d * d * static_cast<double>(n_) * static_cast<double>(o.n_) / n;
    n_ += o.n_;
  }

  std::uint64_t count() const { return n_; }
  double mean() const { return mean_; }
  double variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
  double stddev() const { return std::sqrt(variance()); }
  double std_error() const { return n_ > 0 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0; }

 private:
  std::uint64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
  bool contains(double x) const { return lo <= x && x <= hi; }
};

/// Binomial proportion with a 95% interval: Wilson score interval, or the
/// exact one-sided bound [0, 1 - 0.05^{1/N}] when no trial hit.
struct ProportionEstimate {
  std::uint64_t hits = 0;
  std::uint64_t trials = 0;
  double p = 0.0;
  Interval ci;
  bool one_sided = false;

  double std_error() const {
    return trials > 0 ? std::sqrt(p * (1.0 - p) / static_cast<double>(trials)) : 0.0;
  }
};

ProportionEstimate estimate_proportion(std::uint64_t hits, std::uint64_t trials, double z = 1.959963984540054);

/// Pairwise (cascade) summation; error grows as O(log n).
double pairwise_sum(std::span<const double> x);

/// Standard normal CDF.
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace covertree
