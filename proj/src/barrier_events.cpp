#include "covertree/barrier_events.hpp"

#include <cmath>

#include "covertree/centering.hpp"
#include "covertree/errors.hpp"
#include "covertree/excursion_gw.hpp"

namespace covertree {

namespace {

struct PathFlags {
  bool e = true;  // straight barrier held so far
  bool f = true;  // relaxed barrier held so far
};

double eta_of(std::uint64_t t) { return std::sqrt(2.0 * static_cast<double>(t)); }

bool in_window(const Interval& w, double x) { return w.lo <= x && x <= w.hi; }

}  // namespace

double phi_bar(int n, int j) { return centering(n).rho * static_cast<double>(n - j); }

double psi(int k, double h, int j, double delta) {
  return h + std::pow(static_cast<double>(std::min(j, k - j)), delta);
}

BarrierGeometry barrier_geometry(const BarrierParams& p) {
  if (p.ell < 2 || p.ell >= p.n) throw DomainError("barrier: need 2 <= ell < n");
  if (!(p.delta > 0.0 && p.delta < 1.0 / 6.0)) throw DomainError("barrier: delta must lie in (0, 1/6)");
  BarrierGeometry g;
  g.params = p;
  g.n_prime = p.n - p.ell;
  const double s = s_of(p.n, p.z);
  if (!(s >= 1.0)) throw DomainError("barrier: s_{n,z} < 1");
  g.s = static_cast<std::uint64_t>(std::floor(s));
  const double l = static_cast<double>(p.ell);
  g.h = 0.5 * std::log(l);
  g.r = std::sqrt(std::log(l));
  g.window = {std::sqrt(l) / g.r, std::sqrt(l) * g.r};
  for (int j = 0; j <= g.n_prime; ++j) {
    g.phibar.push_back(phi_bar(p.n, j));
    g.psi.push_back(psi(g.n_prime, g.h, j, p.delta));
  }
  return g;
}

std::vector<double> eta_hat(const CountTree& tree, VertexId v) {
  const int n = tree.depth();
  if (v.level < 0 || v.level > n) throw DomainError("eta_hat: vertex outside tree");
  std::vector<double> out;
  for (int j = 0; j <= v.level; ++j) {
    out.push_back(eta_of(tree.count(ancestor(v, j))) - phi_bar(n, j));
  }
  return out;
}

EventSpec event_E(const BarrierGeometry& g) {
  EventSpec e;
  e.n = g.params.n;
  e.ell = g.params.ell;
  e.s = g.s;
  e.lower.assign(static_cast<std::size_t>(g.n_prime) + 1, 0.0);
  e.window = g.window;
  e.subtree = SubtreeCondition::not_covered;
  return e;
}

EventSpec event_F(const BarrierGeometry& g) {
  EventSpec e;
  e.n = g.params.n;
  e.ell = g.params.ell;
  e.s = g.s;
  for (double p : g.psi) e.lower.push_back(-p);
  e.subtree = SubtreeCondition::not_covered;
  return e;
}

bool has_zero_leaf(int depth, std::uint64_t t, Rng& rng) {
  if (t == 0) return true;
  std::vector<std::pair<int, std::uint64_t>> stack{{0, t}};
  while (!stack.empty()) {
    const auto [level, c] = stack.back();
    stack.pop_back();
    if (level == depth) continue;
    const auto kids = offspring_sum(c, rng);
    if (kids.a == 0 || kids.b == 0) return true;
    stack.emplace_back(level + 1, kids.b);
    stack.emplace_back(level + 1, kids.a);
  }
  return false;
}

EventEstimate estimate_event(const EventSpec& spec, std::uint64_t replicas, Rng& rng) {
  if (replicas < 1) throw DomainError("estimate_event: replicas must be >= 1");
  const int np = spec.n - spec.ell;
  if (spec.ell < 0 || np < 0) throw DomainError("estimate_event: need 0 <= ell <= n");
  if (spec.lower.size() != static_cast<std::size_t>(np) + 1) {
    throw DomainError("estimate_event: need one lower bound per level 0..n'");
  }
  std::vector<double> pb;
  for (int j = 0; j <= np; ++j) pb.push_back(spec.n >= 1 ? phi_bar(spec.n, j) : 0.0);
  std::uint64_t hits = 0;
  for (std::uint64_t r = 0; r < replicas; ++r) {
    const auto t = sample_geodesic_counts(np, spec.s, rng);
    bool ok = true;
    for (int j = 0; j <= np && ok; ++j) ok = eta_of(t[j]) - pb[j] > spec.lower[j];
    ok = ok && in_window(spec.window, eta_of(t[np]) - pb[np]);
    if (ok && spec.subtree != SubtreeCondition::none) {
      const bool zero = has_zero_leaf(spec.ell, t[np], rng);
      ok = (spec.subtree == SubtreeCondition::not_covered) == zero;
    }
    if (ok) ++hits;
  }
  EventEstimate e;
  e.per_vertex = estimate_proportion(hits, replicas);
  const double scale = std::ldexp(1.0, np);
  e.count_mean = scale * e.per_vertex.p;
  e.count_ci = {scale * e.per_vertex.ci.lo, scale * e.per_vertex.ci.hi};
  return e;
}

BarrierCounts count_lambda_gamma(const CountTree& tree, const BarrierGeometry& g) {
  const int n = g.params.n;
  if (tree.depth() != n) throw DomainError("count_lambda_gamma: tree depth differs from n");
  const int np = g.n_prime;
  BarrierCounts out;
  const auto leaves = tree.level_counts(n);
  for (std::uint64_t c : leaves) out.uncovered = out.uncovered || c == 0;
  std::vector<PathFlags> flags(std::size_t{2} << np);
  for (std::uint64_t id = 1; id < (std::uint64_t{2} << np); ++id) {
    const int j = heap_level(id);
    const double eh = eta_of(tree.count_by_id(id)) - g.phibar[j];
    PathFlags f = id == 1 ? PathFlags{} : flags[id >> 1];
    f.e = f.e && eh > 0.0;
    f.f = f.f && eh + g.psi[j] > 0.0;
    if (eh <= -g.psi[j]) out.g_event = true;
    if (j == np) f.e = f.e && in_window(g.window, eh);
    flags[id] = f;
  }
  const std::uint64_t first_u = std::uint64_t{1} << np;
  const std::uint64_t per_u = std::uint64_t{1} << g.params.ell;
  for (std::uint64_t u = 0; u < first_u; ++u) {
    const PathFlags f = flags[first_u + u];
    if (!f.e && !f.f) continue;
    bool zero = false;
    for (std::uint64_t i = u * per_u; i < (u + 1) * per_u && !zero; ++i) zero = leaves[i] == 0;
    if (!zero) continue;
    if (f.e) ++out.lambda;
    if (f.f) ++out.gamma;
  }
  return out;
}

BarrierCounts sample_barrier_counts(const BarrierGeometry& g, Rng& rng) {
  const int np = g.n_prime;
  const int ell = g.params.ell;
  BarrierCounts out;
  struct Frame {
    std::uint64_t id;
    std::uint64_t t;
    PathFlags f;
  };
  std::vector<Frame> stack;
  auto visit = [&](std::uint64_t id, std::uint64_t t, PathFlags f) {
    const int j = heap_level(id);
    const double eh = eta_of(t) - g.phibar[j];
    f.e = f.e && eh > 0.0;
    f.f = f.f && eh + g.psi[j] > 0.0;
    if (eh <= -g.psi[j]) out.g_event = true;
    if (t == 0) {
      // Everything below is unvisited too: eta-hat = -phibar there.
      out.uncovered = true;
      for (int k = j + 1; k <= np; ++k) out.g_event = out.g_event || g.phibar[k] >= g.psi[k];
      return;
    }
    if (j < np) {
      stack.push_back({id, t, f});
      return;
    }
    f.e = f.e && in_window(g.window, eh);
    if (!f.e && !f.f && out.uncovered) return;
    const bool zero = has_zero_leaf(ell, t, rng);
    out.uncovered = out.uncovered || zero;
    if (zero && f.e) ++out.lambda;
    if (zero && f.f) ++out.gamma;
  };
  visit(1, g.s, PathFlags{});
  while (!stack.empty()) {
    const Frame fr = stack.back();
    stack.pop_back();
    const auto kids = offspring_sum(fr.t, rng);
    visit(2 * fr.id, kids.a, fr.f);
    visit(2 * fr.id + 1, kids.b, fr.f);
  }
  return out;
}

}  // namespace covertree
