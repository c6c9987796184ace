#pragma once

#include <cmath>
#include <numbers>

#include "covertree/errors.hpp"

namespace covertree {

/// c* = sqrt(2 ln 2).
inline const double kCStar = std::sqrt(2.0 * std::numbers::ln2);

struct Centering {
  double rho;    ///< c* - ln(n) / (c* n)
  double m;      ///< rho * n
  double cstar;
};

/// Centering constants for depth n >= 1.
inline Centering centering(int n) {
  if (n < 1) throw DomainError("centering: n must be >= 1");
  const double nd = static_cast<double>(n);
  const double rho = kCStar - std::log(nd) / (kCStar * nd);
  return {rho, rho * nd, kCStar};
}

/// s_{n,y} = (m_n + y)^2 / 2, real valued.
inline double s_of(int n, double y) {
  const double a = centering(n).m + y;
  return 0.5 * a * a;
}

}  // namespace covertree
