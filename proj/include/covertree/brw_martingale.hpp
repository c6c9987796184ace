#pragma once

// Gaussian branching random walk on T_k: i.i.d. N(0,1) weights on the edges
// below level 0, g_u = sum of weights on the geodesic from the level-0 vertex
// (so g = 0 there), and the derivative martingales built from level k.

#include <cstdint>
#include <span>
#include <vector>

#include "covertree/mc_stats.hpp"
#include "covertree/rng.hpp"

namespace covertree {

inline constexpr int kMaxBrwDepth = 24;

/// Level-k functionals of the field.
///   X_k  = sum_u (c* k + g_u) e^{-c*(c* k + g_u)}
///   X'_k = same with g_u replaced by g_u - gbar_k
///   X~_k = sum_u e^{-c*(c* k + g_u)}
struct Martingales {
  double gbar = 0.0;
  double x = 0.0;
  double x_prime = 0.0;
  double x_tilde = 0.0;
  /// Magnitude used to judge the identity X' = (X - gbar X~) e^{c* gbar}:
  /// the same expression with every term replaced by its absolute value.
  double identity_scale = 0.0;

  /// |X' - (X - gbar X~) e^{c* gbar}| / identity_scale (0 when both vanish).
  double identity_residual() const;
};

/// Computes the martingales from the level-k values g (size 2^k).
Martingales martingales(std::span<const double> g, int k);

struct BrwSample {
  int k = 0;
  /// g_u for u in V_k, in index order.
  std::vector<double> g;
  /// gbar_j for j = 0..k.
  std::vector<double> gbar_by_level;
  Martingales m;
};

/// Extends the level-j field `g` (size 2^j) by one level into `out`.
void extend_one_level(std::span<const double> g, std::vector<double>& out, Rng& rng);

BrwSample sample_brw(int k, Rng& rng);

struct MartingaleReport {
  int k = 0;
  std::uint64_t outer = 0;
  std::uint64_t inner = 0;
  /// Distribution over outer samples of mean(X_{k+1} continuations) - X_k.
  RunningStats deviation;

  double z_score() const {
    const double se = deviation.std_error();
    return se > 0 ? deviation.mean() / se : 0.0;
  }
};

MartingaleReport martingale_check(int k, std::uint64_t outer, std::uint64_t inner, Rng& rng);

/// `count` independent level-k draws; each entry carries X'_k, gbar_k, X_k, X~_k.
std::vector<Martingales> sample_xprime_stream(int k, std::size_t count, Rng& rng);

/// Pearson correlation with its large-sample standard error 1/sqrt(N).
struct Correlation {
  double r = 0.0;
  double std_error = 0.0;
};

Correlation sample_correlation(std::span<const double> a, std::span<const double> b);

}  // namespace covertree
