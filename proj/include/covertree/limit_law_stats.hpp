#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "covertree/centering.hpp"
#include "covertree/rng.hpp"

namespace covertree {

struct Provenance {
  int n = -1;
  std::string kind;
  std::uint64_t seed = 0;
  std::uint64_t replica_lo = 0;
  std::uint64_t replica_hi = 0;
};

/// Sorted sample with its empirical CDF and quantiles.
class EmpiricalDistribution {
 public:
  /// Throws DataError for an empty sample or non-finite values.
  explicit EmpiricalDistribution(std::vector<double> values, Provenance provenance = {});

  std::span<const double> values() const { return sorted_; }
  std::size_t size() const { return sorted_.size(); }
  const Provenance& provenance() const { return provenance_; }

  /// Fraction of the sample <= x.
  double cdf(double x) const;
  /// Fraction of the sample > x.
  double survival(double x) const { return 1.0 - cdf(x); }
  std::size_t count_above(double x) const;
  /// Linear interpolation between order statistics; quantile(0) = min, quantile(1) = max.
  double quantile(double p) const;
  double mean() const;

 private:
  std::vector<double> sorted_;
  Provenance provenance_;
};

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Kolmogorov limiting tail Q(lambda) = 2 sum_{k>=1} (-1)^{k-1} e^{-2 k^2 lambda^2}.
double kolmogorov_q(double lambda);

/// Two-sample Kolmogorov-Smirnov statistic and asymptotic p-value (with the
/// Stephens small-sample correction of the argument).
TestResult ks_two_sample(const EmpiricalDistribution& a, const EmpiricalDistribution& b);

/// sup |F_d - F| over the sample for a continuous CDF F.
template <class Cdf>
double ks_distance(const EmpiricalDistribution& d, Cdf&& cdf) {
  const auto v = d.values();
  const double n = static_cast<double>(v.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double f = cdf(v[i]);
    worst = std::max({worst, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return worst;
}

/// Category counts for a two-sample chi-square test.
using CategoryCounts = std::map<std::uint64_t, std::pair<std::uint64_t, std::uint64_t>>;

CategoryCounts tabulate(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b);

struct ChiSquareResult {
  double statistic = 0.0;
  double p_value = 1.0;
  int dof = 0;
  int categories = 0;  ///< after pooling
};

/// Two-sample chi-square homogeneity test. Categories with fewer than
/// `min_pooled` combined observations are merged into one bin.
ChiSquareResult chi_square_two_sample(const CategoryCounts& counts, std::uint64_t min_pooled = 20);

struct TailFit {
  double alpha = 0.0;
  double c = 0.0;
  double alpha_se = 0.0;
  double c_se = 0.0;
  std::vector<double> z;
  std::vector<double> survival;
};

/// Fits log P(> z) - log z = log alpha - c z on the grid z_lo, z_lo + step, ..., <= z_hi
/// by generalized least squares with the multinomial covariance of the empirical
/// survival function. Points with fewer than `min_exceed` exceedances are dropped;
/// fewer than 5 remaining points throws AccuracyError.
TailFit tail_fit(const EmpiricalDistribution& d, double z_lo, double z_hi, double step = 0.25,
                 std::size_t min_exceed = 50);

/// Law with P(Z > z) = alpha z e^{-c z} on [z0, inf), z0 the later of the peak 1/c
/// and the crossing of 1; the remaining mass sits below z0 (z0 - Exp(1)).
std::vector<double> sample_exact_tail(std::size_t count, double alpha, double c, Rng& rng);

/// y -> mean_i exp(-alpha X_i e^{-c y}) over the positive X_i.
class MixtureCdf {
 public:
  /// Throws DataError when no X is positive.
  MixtureCdf(double alpha, double c, std::span<const double> x);

  double operator()(double y) const;
  double alpha() const { return alpha_; }
  double c() const { return c_; }
  double excluded_fraction() const { return excluded_; }
  std::span<const double> weights() const { return x_; }

  /// One draw: Y = (log(alpha X) - log E) / c with X uniform over the kept
  /// weights and E ~ Exp(1).
  double sample(Rng& rng) const;

 private:
  double alpha_;
  double c_;
  double excluded_;
  std::vector<double> x_;
};

struct MixtureFit {
  double alpha = 0.0;
  double ks = 1.0;
  double excluded_fraction = 0.0;
};

/// alpha minimizing the KS distance between d and MixtureCdf(alpha, c, x).
MixtureFit mixture_cdf_fit(const EmpiricalDistribution& d, std::span<const double> x,
                           double c = kCStar);

struct ShiftReport {
  TestResult shifted;   ///< KS of (cover - N(0,1)) against tstar
  TestResult control;   ///< KS of (cover - N(0, control_sd^2)) against tstar
  double control_sd = 0.5;
};

/// Throws DomainError when the provenances carry different n.
ShiftReport shift_test(const EmpiricalDistribution& cover, const EmpiricalDistribution& tstar, Rng& rng,
                       double control_sd = 0.5);

}  // namespace covertree
