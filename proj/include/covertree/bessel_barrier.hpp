#pragma once

// Brownian barrier probabilities, the 0-dimensional Bessel process, the
// Gamma-Poisson chain that links it to excursion counts, and the
// Girsanov comparison between Bessel-0 and Brownian paths.

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "covertree/mc_stats.hpp"
#include "covertree/rng.hpp"

namespace covertree {

/// Linear barrier from (t1, m1) to (t2, m2).
struct BarrierLine {
  double t1 = 0.0;
  double t2 = 1.0;
  double m1 = 0.0;
  double m2 = 0.0;

  double at(double t) const { return m1 + (m2 - m1) * (t - t1) / (t2 - t1); }
};

/// Probability that a Brownian bridge from (t1, x) to (t2, w) stays above the line:
/// 1 - exp(-2 (x - m1)_+ (w - m2)_+ / (t2 - t1)).
double bridge_barrier_prob(double x, double w, const BarrierLine& line);

/// The same formula for one step of length dt with barrier values phi0, phi1.
double step_survival(double w0, double w1, double phi0, double phi1, double dt = 1.0);

/// Independent oracle for bridge_barrier_prob: simulates the bridge on a grid
/// of step dt and kills each step with its exact crossing probability.
ProportionEstimate bridge_barrier_mc(double x, double w, const BarrierLine& line, double dt,
                                     std::uint64_t paths, Rng& rng);

/// Exact BESQ(0) transition over time s: N ~ Poisson(z / (2s)),
/// Z' = Gamma(N, scale 2s), and Z' = 0 when N = 0.
double besq0_step(double z, double s, Rng& rng);

/// P(BESQ(0) started at z is alive after time s) = 1 - exp(-z / (2s)).
inline double besq0_survival(double z, double s) { return -std::expm1(-z / (2.0 * s)); }

/// Bessel-0 skeleton Y_0 = y0, Y_1, ..., Y_horizon at unit spacing.
std::vector<double> sample_bessel0(double y0, int horizon, Rng& rng);

/// One state of the chain eta(0), Y_1, eta(1), ..., where
/// Y_{j+1}^2 / 2 | eta(j) ~ Gamma(eta(j)^2 / 2, 1) and
/// eta(j+1)^2 / 2 | Y_{j+1} ~ Poisson(Y_{j+1}^2 / 2).
struct ChainState {
  int j = 0;
  double y = 0.0;              ///< Y_j (for j = 0 this is eta(0))
  std::uint64_t count = 0;     ///< eta(j)^2 / 2

  double eta() const { return std::sqrt(2.0 * static_cast<double>(count)); }
};

ChainState chain_start(std::uint64_t s);
ChainState chain_step(const ChainState& state, Rng& rng);

/// U_s = sqrt(2 L) - sqrt(2 s), L ~ Gamma(s, 1).
double sample_U(double s, Rng& rng);

/// g~(w) = E g(sqrt(2 xi)), xi ~ Poisson(w^2 / 2), summed exactly over the
/// Poisson mass (terms below 1e-17 relative are dropped).
double poisson_smooth(const std::function<double(double)>& g, double w);

/// Poisson(lambda) probabilities on [lo, hi] (inclusive), computed in log space.
std::vector<double> poisson_pmf_range(double lambda, std::uint64_t lo, std::uint64_t hi);

/// Configuration of one Girsanov comparison. Z is a functional of the path at
/// integer times 0..horizon (the start value included).
struct GirsanovSpec {
  double x = 1.0;
  int horizon = 1;
  /// Optional lower barrier at integer times 1..horizon; Z = 1{path_j > barrier[j-1] for all j}.
  std::vector<double> barrier;
  double dt = 1e-3;
  double floor = 1e-6;
};

struct GirsanovReport {
  GirsanovSpec spec;
  RunningStats bessel_side;    ///< Z 1{Y_T > 0} under the exact Bessel-0 skeleton
  RunningStats brownian_side;  ///< Z sqrt(x / W_T) e^{-3/8 int W^-2} 1{inf W > 0}

  double z_score() const;
};

/// Evaluates Z on an integer-time skeleton.
bool girsanov_z(const GirsanovSpec& spec, std::span<const double> skeleton);

GirsanovReport girsanov_check(const GirsanovSpec& spec, std::uint64_t bessel_replicas,
                              std::uint64_t brownian_replicas, Rng& rng);

}  // namespace covertree
