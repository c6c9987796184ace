#include "covertree/alpha_ell.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "covertree/bessel_barrier.hpp"
#include "covertree/centering.hpp"
#include "covertree/distributions.hpp"
#include "covertree/errors.hpp"
#include "covertree/excursion_gw.hpp"

namespace covertree {

namespace {

struct XiRange {
  std::uint64_t lo;
  std::uint64_t hi;  // inclusive; lo > hi means empty
};

void check_ell(int ell) {
  if (ell < 2) throw DomainError("alpha_ell: need ell >= 2");
}

/// xi with sqrt(2 xi) - c* ell in I_ell.
XiRange window_range(int ell) {
  const double l = static_cast<double>(ell);
  const double r = std::sqrt(std::log(l));
  const double a = kCStar * l + std::sqrt(l) / r;
  const double b = kCStar * l + std::sqrt(l) * r;
  return {static_cast<std::uint64_t>(std::ceil(0.5 * a * a)),
          static_cast<std::uint64_t>(std::floor(0.5 * b * b))};
}

double trapezoid(std::span<const double> f, double h, std::size_t stride) {
  double acc = 0.0;
  for (std::size_t i = 0; i + stride < f.size(); i += stride) acc += 0.5 * (f[i] + f[i + stride]);
  return acc * h * static_cast<double>(stride);
}

}  // namespace

double lambda_ell(int ell, double y) {
  const double a = kCStar * ell + y;
  return 0.5 * a * a;
}

TStarSurvival::TStarSurvival(std::vector<std::uint64_t> samples) : sorted_(std::move(samples)) {
  if (sorted_.empty()) throw DataError("TStarSurvival: no samples");
  std::sort(sorted_.begin(), sorted_.end());
}

double TStarSurvival::operator()(std::uint64_t xi) const {
  const auto above = sorted_.end() - std::upper_bound(sorted_.begin(), sorted_.end(), xi);
  return static_cast<double>(above) / static_cast<double>(sorted_.size());
}

double gamma_tilde(int ell, double y, const TStarSurvival& survival) {
  check_ell(ell);
  const XiRange w = window_range(ell);
  if (w.lo > w.hi) return 0.0;
  const auto pmf = poisson_pmf_range(lambda_ell(ell, y), w.lo, w.hi);
  double acc = 0.0;
  for (std::uint64_t xi = w.lo; xi <= w.hi; ++xi) acc += pmf[xi - w.lo] * survival(xi);
  return acc;
}

double window_probability(int ell, double y) {
  check_ell(ell);
  const XiRange w = window_range(ell);
  if (w.lo > w.hi) return 0.0;
  double acc = 0.0;
  for (double p : poisson_pmf_range(lambda_ell(ell, y), w.lo, w.hi)) acc += p;
  return acc;
}

ProportionEstimate gamma_tilde_mc(int ell, double y, std::uint64_t replicas, Rng& rng) {
  check_ell(ell);
  if (replicas < 1) throw DomainError("gamma_tilde_mc: replicas must be >= 1");
  const XiRange w = window_range(ell);
  std::uint64_t hits = 0;
  for (std::uint64_t r = 0; r < replicas; ++r) {
    const std::uint64_t xi = poisson(rng, lambda_ell(ell, y));
    if (xi < w.lo || xi > w.hi) continue;
    const auto leaves = sample_counts(ell, xi, rng).level_counts(ell);
    if (std::find(leaves.begin(), leaves.end(), 0u) != leaves.end()) ++hits;
  }
  return estimate_proportion(hits, replicas);
}

AlphaEstimate alpha_ell(int ell, const std::function<double(double)>& gamma_tilde_fn,
                        const AlphaGrid& grid) {
  check_ell(ell);
  const double l = static_cast<double>(ell);
  const double r = std::sqrt(std::log(l));
  AlphaGrid gr = grid;
  if (gr.y_max == 0.0) gr.y_max = r * std::sqrt(l) + 10.0;
  if (!(gr.step > 0.0) || !(gr.y_max > gr.y_min)) throw DomainError("alpha_ell: bad grid");
  // Even number of intervals so the doubled step lands on the same end point.
  auto intervals = static_cast<std::size_t>(std::ceil((gr.y_max - gr.y_min) / gr.step));
  intervals += intervals % 2;
  const double h = (gr.y_max - gr.y_min) / static_cast<double>(intervals);

  AlphaEstimate est;
  est.ell = ell;
  std::vector<double> f, f_in;
  const double lo = std::sqrt(l) / (2.0 * r);
  const double hi = 2.0 * r * std::sqrt(l);
  for (std::size_t i = 0; i <= intervals; ++i) {
    const double y = gr.y_min + h * static_cast<double>(i);
    const double gt = gamma_tilde_fn(y);
    est.y.push_back(y);
    est.gamma.push_back(gt);
    const double v = y * std::exp(kCStar * y) * gt;
    f.push_back(v);
    f_in.push_back(y >= lo && y <= hi ? v : 0.0);
  }
  const double norm = 1.0 / std::sqrt(std::numbers::pi * l);
  const double fine = trapezoid(f, h, 1);
  const double coarse = trapezoid(f, h, 2);
  est.alpha = norm * fine;
  est.quadrature_error = fine != 0.0 ? std::fabs(fine - coarse) / std::fabs(fine) : 0.0;
  const double inside = trapezoid(f_in, h, 1);
  est.outside_support = fine != 0.0 ? std::fabs(fine - inside) / std::fabs(fine) : 0.0;

  std::vector<double> tail;
  const double th = 0.01;
  for (double y = gr.y_max; y <= gr.y_max + 30.0; y += th) {
    tail.push_back(y * std::exp(kCStar * y) * window_probability(ell, y));
  }
  est.tail_bound = norm * trapezoid(tail, th, 1);
  if (est.quadrature_error > 0.10) {
    throw AccuracyError("alpha_ell: relative quadrature error " + std::to_string(est.quadrature_error) +
                        " exceeds 10%; refine the grid");
  }
  return est;
}

AlphaEstimate alpha_ell_from_tstar(int ell, std::span<const std::uint64_t> tstar, const AlphaGrid& grid,
                                   int batches) {
  const TStarSurvival all(std::vector<std::uint64_t>(tstar.begin(), tstar.end()));
  AlphaEstimate est = alpha_ell(ell, [&](double y) { return gamma_tilde(ell, y, all); }, grid);
  if (batches >= 2 && tstar.size() >= static_cast<std::size_t>(batches)) {
    RunningStats per_batch;
    const std::size_t size = tstar.size() / static_cast<std::size_t>(batches);
    for (int b = 0; b < batches; ++b) {
      const auto part = tstar.subspan(static_cast<std::size_t>(b) * size, size);
      const TStarSurvival s(std::vector<std::uint64_t>(part.begin(), part.end()));
      per_batch.add(alpha_ell(ell, [&](double y) { return gamma_tilde(ell, y, s); }, grid).alpha);
    }
    // Each batch has sqrt(B) times the error of the full sample.
    est.std_error = per_batch.stddev() / std::sqrt(static_cast<double>(batches));
  }
  return est;
}

}  // namespace covertree
