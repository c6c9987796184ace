#include "doctest.h"

#include <vector>

#include "covertree/excursion_gw.hpp"
#include "covertree/limit_law_stats.hpp"
#include "covertree/oracles.hpp"
#include "stat_helpers.hpp"

using namespace covertree;

TEST_CASE("offspring pair law") {
  Rng g = make_stream(5, 1);
  const int draws = 200000;
  RunningStats zero_zero, a, ab;
  for (int i = 0; i < draws; ++i) {
    const auto p = sample_offspring(g);
    zero_zero.add(p.a == 0 && p.b == 0);
    a.add(static_cast<double>(p.a));
    ab.add(static_cast<double>(p.a * p.b));
  }
  CHECK(within_sigma(zero_zero, oracle::offspring_pmf(0, 0), 4));
  CHECK(within_sigma(a, 1.0, 4));
  CHECK(within_sigma(ab, 2.0, 4));
}

TEST_CASE("offspring marginal is geometric(1/2)") {
  Rng g = make_stream(5, 2);
  const int draws = 200000;
  std::vector<int> hist(6, 0);
  for (int i = 0; i < draws; ++i) {
    const auto p = sample_offspring(g);
    if (p.a < hist.size()) ++hist[p.a];
  }
  for (std::size_t m = 0; m < hist.size(); ++m) {
    const double p = std::ldexp(1.0, -static_cast<int>(m) - 1);
    const double se = std::sqrt(p * (1 - p) / draws);
    CHECK(std::fabs(hist[m] / static_cast<double>(draws) - p) < 4 * se);
  }
}

TEST_CASE("pair summation and the Gamma-Poisson route agree") {
  Rng g = make_stream(5, 3);
  const std::uint64_t t = 40;
  std::vector<std::uint64_t> direct, mixed;
  RunningStats cov_direct, cov_mixed;
  for (int i = 0; i < 40000; ++i) {
    const auto d = offspring_sum_by_pairs(t, g);
    const auto m = offspring_sum(t, g);
    direct.push_back(d.a * 1000 + d.b);
    mixed.push_back(m.a * 1000 + m.b);
    cov_direct.add((static_cast<double>(d.a) - 40.0) * (static_cast<double>(d.b) - 40.0));
    cov_mixed.add((static_cast<double>(m.a) - 40.0) * (static_cast<double>(m.b) - 40.0));
  }
  // Cov(a, b) = t (E[ab] = 2 per pair).
  CHECK(within_sigma(cov_direct, 40.0, 4));
  CHECK(within_sigma(cov_mixed, 40.0, 4));
  // Joint law on coarse cells of (a, b).
  std::vector<std::uint64_t> cd, cm;
  for (auto k : direct) cd.push_back((k / 1000) / 8 * 100 + (k % 1000) / 8);
  for (auto k : mixed) cm.push_back((k / 1000) / 8 * 100 + (k % 1000) / 8);
  CHECK(chi_square_two_sample(tabulate(cd, cm)).p_value > 1e-3);
}

TEST_CASE("single excursion structure") {
  Rng g = make_stream(5, 4);
  const auto t0 = sample_single_excursion(0, g);
  CHECK(t0.edges().size() == 1);
  CHECK(t0.count_by_id(1) == 1);
  for (int i = 0; i < 2000; ++i) {
    const auto t = sample_single_excursion(7, g);
    REQUIRE(t.count_by_id(1) == 1);
    for (const auto& e : t.edges()) {
      // A positive edge has a positive parent edge.
      if (e.id > 1) REQUIRE(t.count_by_id(e.id >> 1) > 0);
    }
  }
  CHECK_THROWS_AS(sample_single_excursion(kMaxMaterializedDepth + 1, g), ResourceError);
}

TEST_CASE("leaf reach probability and variance") {
  Rng g = make_stream(5, 5);
  const int draws = 100000;
  RunningStats hit5, var8;
  for (int i = 0; i < draws; ++i) {
    hit5.add(sample_single_excursion(5, g).count_by_id(32) >= 1);
    const double c = static_cast<double>(sample_single_excursion(8, g).count_by_id(256));
    var8.add((c - 1.0) * (c - 1.0));
  }
  CHECK(within_sigma(hit5, 1.0 / 6.0, 4));
  CHECK(within_sigma(var8, 16.0, 4));
}

TEST_CASE("leaf covariances on T_3 match the exact oracle") {
  Rng g = make_stream(5, 6);
  const oracle::SingleExcursionMoments m(3);
  const std::pair<std::uint64_t, std::uint64_t> pairs[] = {{8, 8}, {8, 9}, {8, 10}, {8, 12}};
  RunningStats prod[4];
  for (int i = 0; i < 200000; ++i) {
    const auto t = sample_single_excursion(3, g).to_dense();
    for (int k = 0; k < 4; ++k) {
      prod[k].add((static_cast<double>(t[pairs[k].first]) - 1.0) * (static_cast<double>(t[pairs[k].second]) - 1.0));
    }
  }
  for (int k = 0; k < 4; ++k) CHECK(within_sigma(prod[k], m.covariance(pairs[k].first, pairs[k].second), 4));
}

TEST_CASE("counts of s excursions") {
  Rng g = make_stream(5, 7);
  CHECK(sample_counts(3, 0, g).total() == 0);
  RunningStats leaf;
  for (int i = 0; i < 400; ++i) {
    const auto t = sample_counts(3, 10000, g);
    REQUIRE(t.count_by_id(1) == 10000);
    leaf.add(static_cast<double>(t.count_by_id(8)));
  }
  CHECK(within_sigma(leaf, 10000.0, 4));
}

TEST_CASE("additivity: s1 + s2 excursions equal two independent blocks in law") {
  Rng g = make_stream(5, 8);
  std::vector<std::uint64_t> direct, summed;
  for (int i = 0; i < 30000; ++i) {
    const auto d = sample_counts(3, 5, g);
    auto a = sample_counts(3, 2, g);
    a += sample_counts(3, 3, g);
    REQUIRE(a.count_by_id(1) == 5);
    direct.push_back(std::min<std::uint64_t>(d.count_by_id(8), 20) * 64 + std::min<std::uint64_t>(d.total(), 63 * 8) / 8);
    summed.push_back(std::min<std::uint64_t>(a.count_by_id(8), 20) * 64 + std::min<std::uint64_t>(a.total(), 63 * 8) / 8);
  }
  CHECK(chi_square_two_sample(tabulate(direct, summed)).p_value > 1e-3);
}

TEST_CASE("geodesic counts follow the NB(t, 1/2) chain") {
  Rng g = make_stream(5, 9);
  RunningStats last;
  for (int i = 0; i < 50000; ++i) {
    const auto c = sample_geodesic_counts(6, 3, g);
    REQUIRE(c.size() == 7);
    REQUIRE(c[0] == 3);
    last.add(static_cast<double>(c[6]));
  }
  CHECK(within_sigma(last, 3.0, 4));
}

TEST_CASE("t* on small trees") {
  Rng g = make_stream(5, 10);
  for (int i = 0; i < 100; ++i) REQUIRE(sample_t_star(0, g).t_star == 1);
  TStarSampler s1(1), s2(2);
  RunningStats one1, one2;
  for (int i = 0; i < 100000; ++i) {
    one1.add(s1.sample(g).t_star == 1);
    one2.add(s2.sample(g).t_star == 1);
  }
  CHECK(within_sigma(one1, oracle::single_excursion_cover_probability(1), 4));
  CHECK(within_sigma(one2, oracle::single_excursion_cover_probability(2), 4));
  CHECK_THROWS_AS(s2.sample(g, 0), CapExceededError);
}

TEST_CASE("R and tau") {
  Rng g = make_stream(5, 11);
  RunningStats r3;
  for (int i = 0; i < 100000; ++i) {
    const auto rt = r_and_tau(3, 0, 1.0, g);
    REQUIRE(rt.tau == 1);
    REQUIRE(rt.r.log2_denominator == 3);
    r3.add(rt.r.value());
  }
  CHECK(within_sigma(r3, 1.875, 4));

  const auto rt = r_and_tau(8, 3, 50.0, g);
  CHECK(rt.s_k.value() >= 50.0);
  CHECK(rt.s_k.log2_denominator == 3);
  CHECK(rt.tau >= 1);
  CHECK_THROWS_AS(r_and_tau(8, 3, 1e9, g, 5), CapExceededError);
  CHECK_THROWS_AS(r_and_tau(3, 4, 1.0, g), DomainError);
}
