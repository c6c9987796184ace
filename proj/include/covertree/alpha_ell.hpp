#pragma once

// The regularized non-cover probability gamma~_ell(y) and the integral
//   alpha_ell = (1 / sqrt(pi ell)) int_0^inf y e^{c* y} gamma~_ell(y) dy,
// where gamma~_ell(y) = E P_xi(eta#_ell = 0, sqrt(2 xi) - c* ell in I_ell),
// xi ~ Poisson(lambda_ell(y)), lambda_ell(y) = (c* ell + y)^2 / 2.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "covertree/mc_stats.hpp"
#include "covertree/rng.hpp"

namespace covertree {

/// lambda_ell(y) = (c* ell + y)^2 / 2.
double lambda_ell(int ell, double y);

/// Empirical survival function xi -> P(t*_ell > xi) from t* samples.
class TStarSurvival {
 public:
  explicit TStarSurvival(std::vector<std::uint64_t> samples);

  double operator()(std::uint64_t xi) const;
  std::size_t size() const { return sorted_.size(); }

 private:
  std::vector<std::uint64_t> sorted_;
};

/// gamma~_ell(y) with P(t*_ell > xi) taken from `survival`; the Poisson sum is exact.
double gamma_tilde(int ell, double y, const TStarSurvival& survival);

/// P(sqrt(2 xi) - c* ell in I_ell) for xi ~ Poisson(lambda_ell(y)): an upper bound on gamma~.
double window_probability(int ell, double y);

/// Direct Monte Carlo of gamma~_ell(y): draw xi, then the counts of xi excursions
/// on T_ell, and test for an unreached leaf.
ProportionEstimate gamma_tilde_mc(int ell, double y, std::uint64_t replicas, Rng& rng);

struct AlphaGrid {
  double y_min = 0.0;
  double y_max = 0.0;  ///< 0 selects r_ell sqrt(ell) + 10
  double step = 0.02;
};

struct AlphaEstimate {
  int ell = 0;
  double alpha = 0.0;
  double std_error = 0.0;        ///< batch-means Monte Carlo error (0 for deterministic input)
  double quadrature_error = 0.0; ///< relative |I_h - I_2h| / |I_h|
  double tail_bound = 0.0;       ///< bound on the part of the integral beyond y_max
  /// Share of the integral outside y in [sqrt(ell) / (2 r_ell), 2 r_ell sqrt(ell)].
  double outside_support = 0.0;
  std::vector<double> y;
  std::vector<double> gamma;     ///< gamma~ on the grid
};

/// Trapezoidal alpha_ell for any gamma~ evaluator. Throws AccuracyError when the
/// half-grid estimate of the relative quadrature error exceeds 10%.
AlphaEstimate alpha_ell(int ell, const std::function<double(double)>& gamma_tilde_fn,
                        const AlphaGrid& grid = {});

/// alpha_ell from t*_ell samples, with a batch-means standard error.
AlphaEstimate alpha_ell_from_tstar(int ell, std::span<const std::uint64_t> tstar,
                                   const AlphaGrid& grid = {}, int batches = 20);

}  // namespace covertree
