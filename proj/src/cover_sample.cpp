#include "covertree/cover_sample.hpp"

#include <cmath>
#include <limits>

#include "covertree/centering.hpp"

namespace covertree {

std::pair<double, double> normalized_cover(const CoverSample& sample) {
  const double m = centering(sample.n).m;
  double cover = std::numeric_limits<double>::quiet_NaN();
  if (sample.cover_steps) {
    cover = std::sqrt(std::ldexp(static_cast<double>(*sample.cover_steps), -(sample.n + 1))) - m;
  }
  const double tstar = std::sqrt(2.0 * static_cast<double>(sample.t_star)) - m;
  return {cover, tstar};
}

}  // namespace covertree
