#include "covertree/mc_stats.hpp"

#include <algorithm>

#include "covertree/errors.hpp"

namespace covertree {

ProportionEstimate estimate_proportion(std::uint64_t hits, std::uint64_t trials, double z) {
  if (trials == 0) throw DomainError("estimate_proportion: no trials");
  if (hits > trials) throw DomainError("estimate_proportion: hits > trials");
  ProportionEstimate e;
  e.hits = hits;
  e.trials = trials;
  const double n = static_cast<double>(trials);
  e.p = static_cast<double>(hits) / n;
  if (hits == 0) {
    e.one_sided = true;
    e.ci = {0.0, 1.0 - std::pow(0.05, 1.0 / n)};
    return e;
  }
  const double z2 = z * z;
  const double centre = (e.p + z2 / (2 * n)) / (1 + z2 / n);
  const double half = z / (1 + z2 / n) * std::sqrt(e.p * (1 - e.p) / n + z2 / (4 * n * n));
  e.ci = {std::max(0.0, centre - half), std::min(1.0, centre + half)};
  return e;
}

double pairwise_sum(std::span<const double> x) {
  if (x.size() <= 16) {
    double s = 0.0;
    for (double v : x) s += v;
    return s;
  }
  const std::size_t half = x.size() / 2;
  return pairwise_sum(x.first(half)) + pairwise_sum(x.subspan(half));
}

}  // namespace covertree
