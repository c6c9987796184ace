#pragma once

#include <cstdint>
#include <vector>

#include "covertree/count_tree.hpp"
#include "covertree/cover_sample.hpp"
#include "covertree/rng.hpp"

namespace covertree {

/// Down-crossings into the two child edges of a vertex during one visit
/// from its parent. a + b ~ Geometric(1/3) on {0,1,...}, a | a+b ~ Bin(., 1/2);
/// joint generating function 1 / (3 - x - y).
struct OffspringPair {
  std::uint64_t a = 0;
  std::uint64_t b = 0;
};

inline constexpr int kMaxMaterializedDepth = 16;
inline constexpr int kMaxStreamingDepth = 24;
inline constexpr std::uint64_t kDefaultExcursionCap = 10'000'000;

OffspringPair sample_offspring(Rng& rng);

/// Sum of t independent offspring pairs, by direct summation.
OffspringPair offspring_sum_by_pairs(std::uint64_t t, Rng& rng);

/// Sum of t independent offspring pairs. Small t sums pairs directly; large t
/// uses A ~ NB(t, 1/2), B | A ~ NB(t + A, 2/3), which has the same law.
OffspringPair offspring_sum(std::uint64_t t, Rng& rng);

/// First coordinate of offspring_sum alone: NB(t, 1/2).
std::uint64_t offspring_marginal(std::uint64_t t, Rng& rng);

/// Counts of one root excursion on T_n. Requires n <= kMaxMaterializedDepth.
CountTree sample_single_excursion(int n, Rng& rng);

/// Counts of the first s root excursions on T_n (level-0 count s).
CountTree sample_counts(int n, std::uint64_t s, Rng& rng);

/// Counts T_0 = s, T_1, ..., T_n along the geodesic to one leaf.
std::vector<std::uint64_t> sample_geodesic_counts(int n, std::uint64_t s, Rng& rng);

/// Excursion cover time t*_n, drawing one excursion at a time and only
/// sampling edges whose subtree still contains an unreached leaf.
class TStarSampler {
 public:
  explicit TStarSampler(int n);

  CoverSample sample(Rng& rng, std::uint64_t cap = kDefaultExcursionCap);

  int depth() const { return n_; }

 private:
  int n_;
  std::vector<std::uint32_t> uncovered_;  // unreached leaves below each heap id
  std::vector<std::uint32_t> fresh_;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> stack_;
};

CoverSample sample_t_star(int n, Rng& rng, std::uint64_t cap = kDefaultExcursionCap);

/// Output of the random-time stopping rule tau_k(s) = inf{l : S_k^l >= s}.
struct RTau {
  DyadicRational r;    ///< R_n at tau, denominator 2^n
  DyadicRational s_k;  ///< S_k at tau, denominator 2^k
  std::uint64_t tau = 0;
};

/// Runs root excursions on T_n until S_k^l >= s_target and reports R_n^l, S_k^l, l.
RTau r_and_tau(int n, int k, double s_target, Rng& rng,
               std::uint64_t cap = kDefaultExcursionCap);

}  // namespace covertree
