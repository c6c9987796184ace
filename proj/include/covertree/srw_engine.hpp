#pragma once

// Step-by-step simple random walk on T_n started at rho.
//
// rho has the single neighbour v0; v0 and every internal vertex have three
// neighbours (parent and two children), chosen uniformly; leaves step back to
// their parent. Only down-crossings are counted: every down-crossing is
// matched by one up-crossing, so s full excursions take 2 * sum(counts) steps.

#include <cstdint>
#include <optional>

#include "covertree/count_tree.hpp"
#include "covertree/cover_sample.hpp"
#include "covertree/rng.hpp"

namespace covertree {

/// Deepest tree the step-level engine accepts.
inline constexpr int kMaxSteppingDepth = 12;

/// 2^{n+1} (m_n + 50)^2, with m_0 taken as 0.
std::uint64_t default_step_cap(int n);

struct ExcursionRun {
  CountTree counts;
  std::uint64_t steps = 0;
};

/// Walks s full root excursions and returns the exact down-crossing counts.
/// step_cap = 0 selects 2^{n+1} (sqrt(2s) + 50)^2, the cover cap with m_n
/// replaced by the typical sqrt(2s) of s excursions.
ExcursionRun run_excursions(int n, std::uint64_t s, Rng& rng, std::uint64_t step_cap = 0);

struct CoverRun {
  CoverSample sample;
  /// Counts up to the end of excursion t_star, when requested.
  std::optional<CountTree> counts;
};

/// Walks until every vertex of T_n has been visited, then to the end of
/// the current excursion.
CoverRun run_to_cover(int n, Rng& rng, bool record_counts = false, std::uint64_t step_cap = 0);

}  // namespace covertree
