#pragma once

#include <cstdint>
#include <optional>
#include <utility>

namespace covertree {

/// One Monte Carlo record of a cover experiment on T_n.
struct CoverSample {
  int n = 0;
  /// Root excursions needed to reach every leaf.
  std::uint64_t t_star = 0;
  /// Steps until every vertex has been visited (rho counts as visited at time 0).
  std::optional<std::uint64_t> cover_steps;
  /// Steps at the end of excursion t_star.
  std::optional<std::uint64_t> steps_at_s;
};

/// (sqrt(C_n / 2^{n+1}) - m_n, sqrt(2 t_star) - m_n). The first entry is NaN
/// when cover_steps is absent. Requires n >= 1.
std::pair<double, double> normalized_cover(const CoverSample& sample);

}  // namespace covertree
