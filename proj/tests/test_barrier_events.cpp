#include "doctest.h"

#include <cmath>
#include <vector>

#include "covertree/barrier_events.hpp"
#include "covertree/centering.hpp"
#include "covertree/errors.hpp"
#include "covertree/excursion_gw.hpp"
#include "stat_helpers.hpp"

using namespace covertree;

namespace {

// Counts that put eta-hat at `offset` on every level 0..n' and give every leaf
// a count of 1.
std::vector<std::uint64_t> flat_profile(const BarrierGeometry& g, double offset) {
  const int n = g.params.n;
  std::vector<std::uint64_t> dense(std::size_t{2} << n, 1);
  for (std::uint64_t id = 1; id < (std::uint64_t{2} << g.n_prime); ++id) {
    const double e = g.phibar[heap_level(id)] + offset;
    dense[id] = static_cast<std::uint64_t>(std::llround(0.5 * e * e));
  }
  return dense;
}

}  // namespace

TEST_CASE("barrier curves") {
  CHECK(phi_bar(10, 0) == doctest::Approx(9.8184645).epsilon(1e-8));
  CHECK(phi_bar(10, 10) == 0.0);
  CHECK(phi_bar(12, 3) == doctest::Approx(centering(12).rho * 9));
  const double h = 0.5 * std::log(4.0);
  CHECK(psi(8, h, 0) == doctest::Approx(h));
  CHECK(psi(8, h, 8) == doctest::Approx(h));
  CHECK(psi(8, h, 4) == doctest::Approx(h + std::pow(4.0, 0.1)));
  CHECK(psi(8, h, 3) == psi(8, h, 5));
}

TEST_CASE("geometry") {
  const auto g = barrier_geometry({12, 4, 1.0});
  CHECK(g.n_prime == 8);
  CHECK(g.s == static_cast<std::uint64_t>(std::floor(s_of(12, 1.0))));
  CHECK(g.h == doctest::Approx(std::log(2.0)));
  CHECK(g.window.lo == doctest::Approx(2.0 / std::sqrt(std::log(4.0))));
  CHECK(g.window.hi == doctest::Approx(2.0 * std::sqrt(std::log(4.0))));
  CHECK(g.phibar.size() == 9);
  CHECK(g.psi.size() == 9);
  CHECK(g.params.delta == 0.1);
  CHECK_THROWS_AS(barrier_geometry({12, 1, 1.0}), DomainError);
  CHECK_THROWS_AS(barrier_geometry({12, 12, 1.0}), DomainError);
  CHECK_THROWS_AS(barrier_geometry({12, 4, 1.0, 1.0 / 6.0}), DomainError);
  CHECK_THROWS_AS(barrier_geometry({12, 4, 1.0, 0.0}), DomainError);
}

TEST_CASE("eta-hat") {
  const auto g = barrier_geometry({10, 3, 2.0});
  const auto dense = flat_profile(g, 0.0);
  const auto tree = CountTree::from_dense(10, dense[1], dense);
  const auto e = eta_hat(tree, VertexId{g.n_prime, 5});
  REQUIRE(e.size() == static_cast<std::size_t>(g.n_prime) + 1);
  // Rounding the count to an integer moves eta by at most 1 / eta.
  for (int j = 0; j <= g.n_prime; ++j) CHECK(std::fabs(e[j]) <= 1.0 / g.phibar[j]);
  CHECK(e[0] == doctest::Approx(std::sqrt(2.0 * static_cast<double>(dense[1])) - phi_bar(10, 0)));
  CHECK_THROWS_AS(eta_hat(tree, VertexId{11, 0}), DomainError);
}

TEST_CASE("Lambda on constructed trees") {
  const auto g = barrier_geometry({10, 4, 1.0});
  auto dense = flat_profile(g, 2.0);
  const auto tree = CountTree::from_dense(10, dense[1], dense);
  const double end = eta_hat(tree, VertexId{g.n_prime, 0}).back();
  REQUIRE(g.window.contains(end));
  const auto covered = count_lambda_gamma(tree, g);
  CHECK(covered.lambda == 0);
  CHECK(covered.gamma == 0);
  CHECK_FALSE(covered.uncovered);
  CHECK_FALSE(covered.g_event);

  // One zero leaf below each of two level-n' vertices.
  const std::uint64_t first_leaf = std::uint64_t{1} << 10;
  dense[first_leaf + 3] = 0;
  dense[first_leaf + 16 * 7 + 1] = 0;
  const auto two = count_lambda_gamma(CountTree::from_dense(10, dense[1], dense), g);
  CHECK(two.lambda == 2);
  CHECK(two.gamma == 2);
  CHECK(two.uncovered);

  // Above the endpoint window: E fails, F still holds.
  auto high = flat_profile(g, 5.0);
  high[first_leaf] = 0;
  const auto f_only = count_lambda_gamma(CountTree::from_dense(10, high[1], high), g);
  CHECK(f_only.lambda == 0);
  CHECK(f_only.gamma == 1);
}

TEST_CASE("Lambda >= 1 forces a zero leaf") {
  Rng rng = make_stream(13, 1);
  const auto g = barrier_geometry({10, 3, 1.0});
  int with_lambda = 0;
  for (int i = 0; i < 3000; ++i) {
    const auto b = count_lambda_gamma(sample_counts(10, g.s, rng), g);
    CHECK(b.lambda <= b.gamma);
    if (b.lambda >= 1) {
      ++with_lambda;
      CHECK(b.uncovered);
    }
    const auto s = sample_barrier_counts(g, rng);
    CHECK(s.lambda <= s.gamma);
    if (s.lambda >= 1) CHECK(s.uncovered);
  }
  CHECK(with_lambda > 0);
}

TEST_CASE("streaming and materialized counts agree in law") {
  Rng rng = make_stream(13, 2);
  const auto g = barrier_geometry({9, 3, 1.0});
  RunningStats lam_a, lam_b, unc_a, unc_b, g_a, g_b;
  for (int i = 0; i < 20000; ++i) {
    const auto a = count_lambda_gamma(sample_counts(9, g.s, rng), g);
    const auto b = sample_barrier_counts(g, rng);
    lam_a.add(static_cast<double>(a.lambda));
    lam_b.add(static_cast<double>(b.lambda));
    unc_a.add(a.uncovered);
    unc_b.add(b.uncovered);
    g_a.add(a.g_event);
    g_b.add(b.g_event);
  }
  auto agree = [](const RunningStats& x, const RunningStats& y) {
    return std::fabs(x.mean() - y.mean()) <= 4 * std::hypot(x.std_error(), y.std_error());
  };
  CHECK(agree(lam_a, lam_b));
  CHECK(agree(unc_a, unc_b));
  CHECK(agree(g_a, g_b));
}

TEST_CASE("event estimates") {
  Rng rng = make_stream(13, 3);
  EventSpec trivial;
  trivial.n = 6;
  trivial.ell = 2;
  trivial.s = 10;
  trivial.lower.assign(5, -INFINITY);
  const auto one = estimate_event(trivial, 500, rng);
  CHECK(one.per_vertex.p == 1.0);
  CHECK(one.count_mean == 16.0);

  // 2^{n'} P(E(u)) is the first moment of Lambda.
  const auto g = barrier_geometry({9, 3, 1.0});
  const auto e = estimate_event(event_E(g), 200000, rng);
  RunningStats lam;
  for (int i = 0; i < 40000; ++i) lam.add(static_cast<double>(sample_barrier_counts(g, rng).lambda));
  const double scale = std::ldexp(1.0, g.n_prime);
  const double se = std::hypot(scale * e.per_vertex.std_error(), lam.std_error());
  CHECK(std::fabs(e.count_mean - lam.mean()) <= 4 * se);

  trivial.lower.resize(3);
  CHECK_THROWS_AS(estimate_event(trivial, 10, rng), DomainError);
  CHECK_THROWS_AS(estimate_event(event_E(g), 0, rng), DomainError);
}

TEST_CASE("zero-leaf search") {
  Rng rng = make_stream(13, 4);
  CHECK(has_zero_leaf(3, 0, rng));
  CHECK_FALSE(has_zero_leaf(0, 1, rng));
  // One excursion reaches both children of a vertex with probability 1/3,
  // so a single crossing almost never covers a depth-10 subtree.
  int zero = 0;
  for (int i = 0; i < 1000; ++i) zero += has_zero_leaf(10, 1, rng);
  CHECK(zero == 1000);
  RunningStats depth1;
  for (int i = 0; i < 100000; ++i) depth1.add(has_zero_leaf(1, 1, rng));
  CHECK(within_sigma(depth1, 2.0 / 3.0, 4));
}
