#pragma once

// Barrier events for the normalized occupation times eta_v(j) = sqrt(2 T^s_{v,j})
// at s = floor(s_{n,z}), and the counts Lambda (straight barrier) and
// Gamma (relaxed curved barrier) over the vertices of level n' = n - ell.

#include <cstdint>
#include <limits>
#include <vector>

#include "covertree/count_tree.hpp"
#include "covertree/mc_stats.hpp"
#include "covertree/rng.hpp"

namespace covertree {

inline constexpr double kDefaultDelta = 0.1;

/// phibar_n(j) = rho_n (n - j).
double phi_bar(int n, int j);

/// psi_{k,h}(j) = h + min(j, k - j)^delta.
double psi(int k, double h, int j, double delta = kDefaultDelta);

struct BarrierParams {
  int n = 12;
  int ell = 4;
  double z = 1.0;
  double delta = kDefaultDelta;
};

/// Everything derived from (n, ell, z, delta).
struct BarrierGeometry {
  BarrierParams params;
  int n_prime = 0;
  std::uint64_t s = 0;      ///< floor(s_{n,z})
  double h = 0.0;           ///< h_ell = ln(ell) / 2
  double r = 0.0;           ///< r_ell = sqrt(ln ell)
  Interval window;          ///< I_ell = sqrt(ell) [1/r, r]
  std::vector<double> phibar;  ///< j = 0..n'
  std::vector<double> psi;     ///< psi_{n', h_ell}(j), j = 0..n'
};

/// Requires 2 <= ell < n and delta in (0, 1/6).
BarrierGeometry barrier_geometry(const BarrierParams& p);

/// eta-hat_v(j) = sqrt(2 T_{v,j}) - phibar_n(j) for j = 0..|v|, n = tree depth,
/// read from the counts as they are (their root multiplicity fixes s).
std::vector<double> eta_hat(const CountTree& tree, VertexId v);

enum class SubtreeCondition { none, not_covered, covered };

/// Event for one fixed vertex u at level n' = n - ell:
/// eta-hat_u(j) > lower[j] for j = 0..n', eta-hat_u(n') in [window.lo, window.hi],
/// and a condition on the depth-ell subtree below u.
struct EventSpec {
  int n = 0;
  int ell = 0;
  std::uint64_t s = 0;
  std::vector<double> lower;
  Interval window{-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  SubtreeCondition subtree = SubtreeCondition::none;
};

/// E_{n,ell}(u): straight barrier, endpoint in I_ell, subtree not covered.
EventSpec event_E(const BarrierGeometry& g);
/// F_{n,ell}(u): relaxed barrier -psi, subtree not covered.
EventSpec event_F(const BarrierGeometry& g);

struct EventEstimate {
  ProportionEstimate per_vertex;
  /// 2^{n'} times the per-vertex probability and interval (first moment of the count).
  double count_mean = 0.0;
  Interval count_ci;
};

/// Monte Carlo along one geodesic (count chain T_{j+1} | T_j ~ NB(T_j, 1/2))
/// followed by the depth-ell subtree below u.
EventEstimate estimate_event(const EventSpec& spec, std::uint64_t replicas, Rng& rng);

struct BarrierCounts {
  std::uint64_t lambda = 0;
  std::uint64_t gamma = 0;
  bool g_event = false;    ///< some vertex at level j <= n' has eta-hat <= -psi(j)
  bool uncovered = false;  ///< some leaf of T_n has count 0
};

/// Lambda, Gamma, G and non-cover for a materialized tree of depth n.
BarrierCounts count_lambda_gamma(const CountTree& tree, const BarrierGeometry& g);

/// The same quantities for a fresh draw at s = g.s, without materializing the tree.
BarrierCounts sample_barrier_counts(const BarrierGeometry& g, Rng& rng);

/// Whether the counts of t excursions through a subtree of the given depth
/// (t crossings of its top edge) leave some leaf at 0. Stops at the first zero.
bool has_zero_leaf(int depth, std::uint64_t t, Rng& rng);

}  // namespace covertree
