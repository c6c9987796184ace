#pragma once

// Exact reference values for small trees, computed from the random walk's
// transition matrix by linear algebra. Nothing here uses the samplers.

#include <cstdint>
#include <vector>

namespace covertree::oracle {

/// Moments of the per-excursion down-crossing counts N_e of the edges of T_n
/// (e named by the heap id of its lower end), for one root excursion.
class SingleExcursionMoments {
 public:
  explicit SingleExcursionMoments(int n);  // n <= 8

  int depth() const { return n_; }
  double mean(std::uint64_t e) const;
  double covariance(std::uint64_t e, std::uint64_t f) const;
  /// Var(R_n^1), R_n^1 = 2^{-n} sum_e N_e.
  double variance_r() const;
  /// E[R_n^1].
  double mean_r() const;

 private:
  int n_;
  std::size_t size_;
  std::vector<double> green_;  // expected visits to j starting from i, walk killed at rho

  double g(std::uint64_t from, std::uint64_t to) const { return green_[(from - 1) * size_ + (to - 1)]; }
  double second_moment(std::uint64_t e, std::uint64_t f) const;
};

/// E[C_n], the expected number of steps to visit every vertex of T_n, rho visited at time 0. n <= 2.
double expected_cover_steps(int n);

/// P(one root excursion reaches every leaf of T_n) = P(t*_n = 1). n <= 3.
double single_excursion_cover_probability(int n);

/// P(a = i, b = j) for the down-crossings into the two child edges during one
/// visit from the parent, by summing over the walk's choice sequences.
double offspring_pmf(std::uint64_t i, std::uint64_t j);

}  // namespace covertree::oracle
