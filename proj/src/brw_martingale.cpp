#include "covertree/brw_martingale.hpp"

#include <cmath>

#include "covertree/centering.hpp"
#include "covertree/distributions.hpp"
#include "covertree/errors.hpp"

namespace covertree {

namespace {

void check_depth(int k) {
  if (k < 0) throw DomainError("brw: depth must be >= 0");
  if (k > kMaxBrwDepth) throw ResourceError("brw: depth exceeds the memory budget");
}

}  // namespace

double Martingales::identity_residual() const {
  const double rhs = (x - gbar * x_tilde) * std::exp(kCStar * gbar);
  const double diff = std::fabs(x_prime - rhs);
  if (diff == 0.0) return 0.0;
  return diff / identity_scale;
}

Martingales martingales(std::span<const double> g, int k) {
  check_depth(k);
  if (g.size() != (std::size_t{1} << k)) throw DomainError("martingales: field size is not 2^k");
  const double a = kCStar * k;
  Martingales m;
  m.gbar = pairwise_sum(g) / static_cast<double>(g.size());
  std::vector<double> tx(g.size()), txp(g.size()), tt(g.size()), ta(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double h = a + g[i];
    const double w = std::exp(-kCStar * h);
    const double hp = h - m.gbar;
    tx[i] = h * w;
    tt[i] = w;
    ta[i] = std::fabs(h) * w;
    txp[i] = hp * std::exp(-kCStar * hp);
  }
  m.x = pairwise_sum(tx);
  m.x_prime = pairwise_sum(txp);
  m.x_tilde = pairwise_sum(tt);
  m.identity_scale = (pairwise_sum(ta) + std::fabs(m.gbar) * m.x_tilde) * std::exp(kCStar * m.gbar);
  return m;
}

void extend_one_level(std::span<const double> g, std::vector<double>& out, Rng& rng) {
  out.resize(2 * g.size());
  fill_standard_normal(rng, out);
  for (std::size_t i = 0; i < g.size(); ++i) {
    out[2 * i] += g[i];
    out[2 * i + 1] += g[i];
  }
}

BrwSample sample_brw(int k, Rng& rng) {
  check_depth(k);
  BrwSample s;
  s.k = k;
  s.g.assign(1, 0.0);
  s.gbar_by_level.push_back(0.0);
  std::vector<double> next;
  for (int j = 1; j <= k; ++j) {
    extend_one_level(s.g, next, rng);
    s.g.swap(next);
    s.gbar_by_level.push_back(pairwise_sum(s.g) / static_cast<double>(s.g.size()));
  }
  s.m = martingales(s.g, k);
  return s;
}

MartingaleReport martingale_check(int k, std::uint64_t outer, std::uint64_t inner, Rng& rng) {
  if (k < 1) throw DomainError("martingale_check: k must be >= 1");
  if (outer < 2 || inner < 1) throw DomainError("martingale_check: need outer >= 2, inner >= 1");
  MartingaleReport r{k, outer, inner, {}};
  std::vector<double> next;
  for (std::uint64_t o = 0; o < outer; ++o) {
    const BrwSample s = sample_brw(k, rng);
    RunningStats cont;
    for (std::uint64_t i = 0; i < inner; ++i) {
      extend_one_level(s.g, next, rng);
      cont.add(martingales(next, k + 1).x);
    }
    r.deviation.add(cont.mean() - s.m.x);
  }
  return r;
}

std::vector<Martingales> sample_xprime_stream(int k, std::size_t count, Rng& rng) {
  std::vector<Martingales> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(sample_brw(k, rng).m);
  return out;
}

Correlation sample_correlation(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 3) throw DomainError("sample_correlation: need equal sizes >= 3");
  RunningStats sa, sb;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sa.add(a[i]);
    sb.add(b[i]);
  }
  double sab = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sab += (a[i] - sa.mean()) * (b[i] - sb.mean());
  const double n = static_cast<double>(a.size());
  const double r = sab / (n - 1) / (sa.stddev() * sb.stddev());
  return {r, 1.0 / std::sqrt(n)};
}

}  // namespace covertree
