#include "covertree/excursion_gw.hpp"

#include <cmath>
#include <limits>

#include "covertree/distributions.hpp"
#include "covertree/errors.hpp"

namespace covertree {

namespace {

// Above this parent count the Gamma-Poisson route is cheaper than summing pairs.
constexpr std::uint64_t kPairLoopMax = 12;
constexpr std::uint64_t kCountLimit = std::uint64_t{1} << 62;

void check_count(std::uint64_t t) {
  if (t > kCountLimit) throw ArithmeticError("excursion count exceeds 2^62");
}

void check_materialized_depth(int n) {
  if (n < 0) throw DomainError("tree depth must be >= 0");
  if (n > kMaxMaterializedDepth) {
    throw ResourceError("CountTree depth " + std::to_string(n) + " exceeds the materialization limit " +
                        std::to_string(kMaxMaterializedDepth));
  }
}

}  // namespace

OffspringPair sample_offspring(Rng& rng) {
  const std::uint64_t m = geometric(rng, 1.0 / 3.0);
  const std::uint64_t a = binomial_half(rng, m);
  return {a, m - a};
}

OffspringPair offspring_sum_by_pairs(std::uint64_t t, Rng& rng) {
  OffspringPair sum;
  for (std::uint64_t i = 0; i < t; ++i) {
    const auto p = sample_offspring(rng);
    sum.a += p.a;
    sum.b += p.b;
  }
  return sum;
}

OffspringPair offspring_sum(std::uint64_t t, Rng& rng) {
  if (t <= kPairLoopMax) return offspring_sum_by_pairs(t, rng);
  check_count(t);
  // Given A = a, the coefficient of x^a in (3 - x - y)^{-t} is proportional
  // to (3 - y)^{-(t + a)}, i.e. B | A = a ~ NB(t + a, 2/3).
  const std::uint64_t a = negative_binomial(rng, static_cast<double>(t), 0.5);
  const std::uint64_t b = negative_binomial(rng, static_cast<double>(t + a), 2.0 / 3.0);
  check_count(a);
  check_count(b);
  return {a, b};
}

std::uint64_t offspring_marginal(std::uint64_t t, Rng& rng) {
  if (t <= kPairLoopMax) {
    std::uint64_t a = 0;
    for (std::uint64_t i = 0; i < t; ++i) a += geometric_half(rng);
    return a;
  }
  check_count(t);
  const std::uint64_t a = negative_binomial(rng, static_cast<double>(t), 0.5);
  check_count(a);
  return a;
}

CountTree sample_counts(int n, std::uint64_t s, Rng& rng) {
  check_materialized_depth(n);
  check_count(s);
  if (s == 0) return CountTree(n, 0);
  // Level by level in id order, so the edge list comes out sorted.
  std::vector<CountTree::Edge> edges{{1, s}};
  std::size_t level_begin = 0;
  for (int level = 0; level < n; ++level) {
    const std::size_t level_end = edges.size();
    for (std::size_t i = level_begin; i < level_end; ++i) {
      const auto e = edges[i];
      const auto kids = offspring_sum(e.count, rng);
      if (kids.a > 0) edges.push_back({2 * e.id, kids.a});
      if (kids.b > 0) edges.push_back({2 * e.id + 1, kids.b});
    }
    level_begin = level_end;
  }
  return CountTree(n, s, std::move(edges));
}

CountTree sample_single_excursion(int n, Rng& rng) { return sample_counts(n, 1, rng); }

std::vector<std::uint64_t> sample_geodesic_counts(int n, std::uint64_t s, Rng& rng) {
  if (n < 0) throw DomainError("sample_geodesic_counts: n must be >= 0");
  check_count(s);
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(n) + 1, 0);
  counts[0] = s;
  for (int j = 1; j <= n; ++j) {
    if (counts[j - 1] == 0) break;
    counts[j] = offspring_marginal(counts[j - 1], rng);
  }
  return counts;
}

TStarSampler::TStarSampler(int n) : n_(n) {
  if (n < 0) throw DomainError("TStarSampler: n must be >= 0");
  if (n > kMaxStreamingDepth) throw ResourceError("TStarSampler: depth exceeds streaming limit");
  fresh_.assign(std::size_t{2} << n, 0);
  for (std::uint64_t id = (std::uint64_t{2} << n) - 1; id >= 1; --id) {
    fresh_[id] = heap_level(id) == n ? 1u : fresh_[2 * id] + fresh_[2 * id + 1];
  }
}

CoverSample TStarSampler::sample(Rng& rng, std::uint64_t cap) {
  uncovered_ = fresh_;
  const int n = n_;
  for (std::uint64_t excursion = 1; excursion <= cap; ++excursion) {
    stack_.clear();
    stack_.emplace_back(1, 1);
    while (!stack_.empty()) {
      const auto [id, t] = stack_.back();
      stack_.pop_back();
      if (heap_level(id) == n) {
        for (std::uint64_t a = id; a >= 1; a >>= 1) --uncovered_[a];
        continue;
      }
      const std::uint64_t left = 2 * id, right = left + 1;
      const bool need_left = uncovered_[left] > 0;
      const bool need_right = uncovered_[right] > 0;
      if (need_left && need_right) {
        const auto kids = offspring_sum(t, rng);
        if (kids.b > 0) stack_.emplace_back(right, kids.b);
        if (kids.a > 0) stack_.emplace_back(left, kids.a);
      } else if (need_left || need_right) {
        // The two children are exchangeable; the marginal law is the same.
        const std::uint64_t c = offspring_marginal(t, rng);
        if (c > 0) stack_.emplace_back(need_left ? left : right, c);
      }
    }
    if (uncovered_[1] == 0) return CoverSample{n, excursion, std::nullopt, std::nullopt};
  }
  throw CapExceededError("sample_t_star: excursion cap exceeded");
}

CoverSample sample_t_star(int n, Rng& rng, std::uint64_t cap) {
  TStarSampler sampler(n);
  return sampler.sample(rng, cap);
}

RTau r_and_tau(int n, int k, double s_target, Rng& rng, std::uint64_t cap) {
  if (n < 0 || k < 0 || k > n) throw DomainError("r_and_tau: need 0 <= k <= n");
  if (n > kMaxStreamingDepth) throw ResourceError("r_and_tau: depth exceeds streaming limit");
  if (!(s_target >= 0.0)) throw DomainError("r_and_tau: negative target");
  const double level_target = std::ldexp(s_target, k);
  std::uint64_t total = 0;
  std::uint64_t level_k = 0;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> stack;
  for (std::uint64_t excursion = 1; excursion <= cap; ++excursion) {
    stack.assign(1, {1, 1});
    while (!stack.empty()) {
      const auto [id, t] = stack.back();
      stack.pop_back();
      total += t;
      const int level = heap_level(id);
      if (level == k) level_k += t;
      if (level == n) continue;
      const auto kids = offspring_sum(t, rng);
      if (kids.b > 0) stack.emplace_back(2 * id + 1, kids.b);
      if (kids.a > 0) stack.emplace_back(2 * id, kids.a);
    }
    if (static_cast<double>(level_k) >= level_target) {
      return {{total, n}, {level_k, k}, excursion};
    }
  }
  throw CapExceededError("r_and_tau: excursion cap exceeded");
}

}  // namespace covertree
