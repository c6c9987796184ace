#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "covertree/brw_martingale.hpp"
#include "covertree/centering.hpp"
#include "covertree/errors.hpp"
#include "covertree/limit_law_stats.hpp"
#include "covertree/tree.hpp"
#include "stat_helpers.hpp"

using namespace covertree;

TEST_CASE("depth zero") {
  Rng g = make_stream(11, 1);
  const auto s = sample_brw(0, g);
  REQUIRE(s.g.size() == 1);
  CHECK(s.g[0] == 0.0);
  CHECK(s.m.gbar == 0.0);
  CHECK(s.m.x == 0.0);
  CHECK(s.m.x_tilde == 1.0);
}

TEST_CASE("var of the level mean") {
  Rng g = make_stream(11, 2);
  std::vector<double> gbar1;
  for (int i = 0; i < 1000000; ++i) gbar1.push_back(sample_brw(1, g).m.gbar);
  const auto v1 = variance_with_error(gbar1);
  CHECK(std::fabs(v1.variance - 0.5) < 4 * v1.std_error);

  std::vector<double> gbar5;
  for (int i = 0; i < 100000; ++i) gbar5.push_back(sample_brw(5, g).m.gbar);
  const auto v5 = variance_with_error(gbar5);
  CHECK(std::fabs(v5.variance - (1.0 - 1.0 / 32)) < 4 * v5.std_error);
}

TEST_CASE("covariance of a vertex with the level mean") {
  Rng g = make_stream(11, 3);
  const int k = 5, draws = 100000;
  std::vector<RunningStats> cov(32);
  for (int i = 0; i < draws; ++i) {
    const auto s = sample_brw(k, g);
    for (int u = 0; u < 32; ++u) cov[u].add(s.g[u] * s.m.gbar);
  }
  for (int u = 0; u < 32; ++u) CHECK(within_sigma(cov[u], 0.96875, 4));
}

TEST_CASE("field covariance is the depth of the common ancestor") {
  Rng g = make_stream(11, 4);
  const int k = 4, draws = 100000;
  std::vector<RunningStats> cov(16 * 16);
  for (int i = 0; i < draws; ++i) {
    const auto s = sample_brw(k, g);
    for (int u = 0; u < 16; ++u)
      for (int w = u; w < 16; ++w) cov[u * 16 + w].add(s.g[u] * s.g[w]);
  }
  for (int u = 0; u < 16; ++u)
    for (int w = u; w < 16; ++w) {
      const VertexId a{k, static_cast<std::uint64_t>(u)}, b{k, static_cast<std::uint64_t>(w)};
      const double depth = lca(a, b).level;
      CHECK(within_sigma(cov[u * 16 + w], depth, 4));
    }
}

TEST_CASE("tilting identity holds to rounding") {
  Rng g = make_stream(11, 5);
  double worst = 0.0;
  for (int i = 0; i < 2000; ++i) {
    const int k = i % 13;
    worst = std::max(worst, sample_brw(k, g).m.identity_residual());
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("unconditional mean of X_k is zero") {
  // E[(a + g) e^{-c*(a + g)}] = e^{-c* a + c*^2 k / 2} (a - c* k) = 0 with a = c* k.
  Rng g = make_stream(11, 6);
  for (int k : {1, 3, 4}) {
    RunningStats x;
    for (int i = 0; i < 200000; ++i) x.add(sample_brw(k, g).m.x);
    CHECK(within_sigma(x, 0.0, 4));
  }
}

TEST_CASE("martingale deviation is centred") {
  Rng g = make_stream(11, 7);
  const auto r = martingale_check(3, 2000, 200, g);
  CHECK(std::fabs(r.z_score()) < 4);
  const auto one = martingale_check(3, 4000, 1, g);
  CHECK(std::fabs(one.z_score()) < 4);
  CHECK(one.deviation.stddev() > r.deviation.stddev());
}

TEST_CASE("X-tilde shrinks with depth") {
  Rng g = make_stream(11, 8);
  std::vector<double> medians;
  for (int k : {8, 12, 16}) {
    std::vector<double> t;
    for (const auto& m : sample_xprime_stream(k, k == 16 ? 200 : 1000, g)) t.push_back(m.x_tilde);
    medians.push_back(EmpiricalDistribution(t).quantile(0.5));
  }
  CHECK(medians[0] > medians[1]);
  CHECK(medians[1] > medians[2]);
}

TEST_CASE("stream edge cases") {
  Rng g = make_stream(11, 9);
  CHECK(sample_xprime_stream(6, 0, g).empty());
  CHECK_THROWS_AS(sample_brw(-1, g), DomainError);
  CHECK_THROWS_AS(sample_brw(kMaxBrwDepth + 1, g), ResourceError);
  CHECK_THROWS_AS(martingale_check(0, 10, 10, g), DomainError);
  const std::vector<double> bad(3, 0.0);
  CHECK_THROWS_AS(martingales(bad, 2), DomainError);
}

TEST_CASE("sample correlation") {
  Rng g = make_stream(11, 10);
  std::vector<double> a, b;
  for (int i = 0; i < 20000; ++i) {
    const auto s = sample_brw(2, g);
    a.push_back(s.g[0]);
    b.push_back(s.g[1]);
  }
  // Siblings share the level-1 increment: correlation 1/2.
  const auto c = sample_correlation(a, b);
  CHECK(std::fabs(c.r - 0.5) < 4 * c.std_error);
}
