#pragma once

// Exact samplers used throughout. All take a 64-bit uniform random bit
// generator by reference and consume a deterministic number of draws per
// accepted variate (rejection loops aside), so results depend only on the
// generator stream.

#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>

#include "covertree/errors.hpp"

namespace covertree {

/// Uniform on the open interval (0, 1), 53-bit resolution.
template <class G>
inline double uniform01(G& g) {
  return (static_cast<double>(g() >> 11) + 0.5) * 0x1.0p-53;
}

template <class G>
inline double standard_normal(G& g) {
  // Box-Muller; the sine branch is discarded.
  const double r = std::sqrt(-2.0 * std::log(uniform01(g)));
  return r * std::cos(2.0 * std::numbers::pi * uniform01(g));
}

template <class G>
inline void fill_standard_normal(G& g, std::span<double> out) {
  std::size_t i = 0;
  for (; i + 1 < out.size(); i += 2) {
    const double r = std::sqrt(-2.0 * std::log(uniform01(g)));
    const double theta = 2.0 * std::numbers::pi * uniform01(g);
    out[i] = r * std::cos(theta);
    out[i + 1] = r * std::sin(theta);
  }
  if (i < out.size()) out[i] = standard_normal(g);
}

/// Failures before the first success at p = 1/2, from trailing zero bits.
template <class G>
inline std::uint64_t geometric_half(G& g) {
  std::uint64_t failures = 0;
  for (;;) {
    const std::uint64_t bits = g();
    if (bits != 0) return failures + static_cast<std::uint64_t>(std::countr_zero(bits));
    failures += 64;
  }
}

/// Failures before the first success, success probability p in (0, 1], by inversion.
template <class G>
inline std::uint64_t geometric(G& g, double p) {
  if (p >= 1.0) return 0;
  return static_cast<std::uint64_t>(std::floor(std::log(uniform01(g)) / std::log1p(-p)));
}

/// Binomial(trials, 1/2) as the popcount of `trials` fair bits.
template <class G>
inline std::uint64_t binomial_half(G& g, std::uint64_t trials) {
  std::uint64_t heads = 0;
  while (trials >= 64) {
    heads += static_cast<std::uint64_t>(std::popcount(g()));
    trials -= 64;
  }
  if (trials > 0) {
    const std::uint64_t mask = (std::uint64_t{1} << trials) - 1;
    heads += static_cast<std::uint64_t>(std::popcount(g() & mask));
  }
  return heads;
}

/// Gamma(shape, scale) by Marsaglia-Tsang; shape < 1 via the U^(1/shape) boost.
template <class G>
inline double gamma(G& g, double shape, double scale = 1.0) {
  if (!(shape >= 0.0) || !(scale > 0.0)) throw DomainError("gamma: bad parameters");
  if (shape == 0.0) return 0.0;
  double boost = 1.0;
  if (shape < 1.0) {
    boost = std::pow(uniform01(g), 1.0 / shape);
    shape += 1.0;
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = standard_normal(g);
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform01(g);
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2 ||
        std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) {
      return d * v * scale * boost;
    }
  }
}

/// Poisson(mean): sequential inversion below mean 10, Hormann's PTRS above.
template <class G>
inline std::uint64_t poisson(G& g, double mean) {
  if (!(mean >= 0.0)) throw DomainError("poisson: negative mean");
  if (mean == 0.0) return 0;
  if (mean > 0x1.0p62) throw ArithmeticError("poisson: mean exceeds 64-bit count range");
  if (mean < 10.0) {
    double p = std::exp(-mean);
    double cdf = p;
    const double u = uniform01(g);
    std::uint64_t k = 0;
    while (u > cdf) {
      ++k;
      p *= mean / static_cast<double>(k);
      cdf += p;
      if (p < 1e-300 && cdf < u) break;  // numerical tail; u beyond the summable mass
    }
    return k;
  }
  const double slam = std::sqrt(mean);
  const double loglam = std::log(mean);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    const double u = uniform01(g) - 0.5;
    const double v = uniform01(g);
    const double us = 0.5 - std::fabs(u);
    const double kd = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= vr) return static_cast<std::uint64_t>(kd);
    if (kd < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
        -mean + kd * loglam - std::lgamma(kd + 1.0)) {
      return static_cast<std::uint64_t>(kd);
    }
  }
}

/// Failures before `size` successes with success probability p, as the
/// Gamma-Poisson mixture Poisson(Gamma(size, (1-p)/p)).
template <class G>
inline std::uint64_t negative_binomial(G& g, double size, double p) {
  if (!(p > 0.0 && p <= 1.0) || !(size >= 0.0)) throw DomainError("negative_binomial: bad parameters");
  if (p == 1.0 || size == 0.0) return 0;
  return poisson(g, gamma(g, size, (1.0 - p) / p));
}

}  // namespace covertree
