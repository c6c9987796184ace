#include "doctest.h"

#include "covertree/centering.hpp"
#include "covertree/oracles.hpp"
#include "covertree/srw_engine.hpp"
#include "stat_helpers.hpp"

using namespace covertree;

TEST_CASE("path of length one") {
  Rng g = make_stream(9, 1);
  const auto run = run_excursions(0, 5, g);
  CHECK(run.counts.count_by_id(1) == 5);
  CHECK(run.steps == 10);
  const auto cover = run_to_cover(0, g);
  CHECK(cover.sample.cover_steps == 1u);
  CHECK(cover.sample.t_star == 1);
  CHECK(cover.sample.steps_at_s == 2u);
}

TEST_CASE("step accounting and root multiplicity") {
  Rng g = make_stream(9, 2);
  for (int n = 0; n <= 8; ++n) {
    for (int i = 0; i < 30; ++i) {
      const std::uint64_t s = 1 + static_cast<std::uint64_t>(i % 7);
      const auto run = run_excursions(n, s, g);
      REQUIRE(run.counts.count_by_id(1) == s);
      REQUIRE(run.steps == 2 * run.counts.total());
      const auto cover = run_to_cover(n, g, true);
      REQUIRE(cover.counts->count_by_id(1) == cover.sample.t_star);
      REQUIRE(*cover.sample.steps_at_s == 2 * cover.counts->total());
      REQUIRE(*cover.sample.cover_steps <= *cover.sample.steps_at_s);
    }
  }
}

TEST_CASE("expected cover steps match first-step analysis") {
  Rng g = make_stream(9, 3);
  RunningStats c1, c2;
  for (int i = 0; i < 100000; ++i) {
    c1.add(static_cast<double>(*run_to_cover(1, g).sample.cover_steps));
    c2.add(static_cast<double>(*run_to_cover(2, g).sample.cover_steps));
  }
  CHECK(within_sigma(c1, oracle::expected_cover_steps(1), 4));
  CHECK(within_sigma(c2, oracle::expected_cover_steps(2), 4));
}

TEST_CASE("leaf reach probability per excursion") {
  Rng g = make_stream(9, 4);
  for (int n : {1, 3, 6}) {
    RunningStats hit;
    for (int i = 0; i < 40000; ++i) {
      hit.add(run_excursions(n, 1, g).counts.count_by_id(std::uint64_t{1} << n) >= 1);
    }
    CHECK(within_sigma(hit, 1.0 / (n + 1), 4));
  }
}

TEST_CASE("mean leaf count over many excursions") {
  Rng g = make_stream(9, 5);
  const auto run = run_excursions(2, 100000, g);
  double mean = 0.0;
  for (auto c : run.counts.level_counts(2)) mean += static_cast<double>(c);
  mean /= 4.0 * 100000.0;
  // Var of a leaf count over s excursions is 4s; the four leaves are positively
  // correlated, so sd(mean) <= sqrt(4s)/s.
  CHECK(std::fabs(mean - 1.0) < 4.0 * std::sqrt(4.0 * 100000.0) / 100000.0);
}

TEST_CASE("normalized cover statistics") {
  const auto c = centering(10);
  CHECK(c.rho == doctest::Approx(0.98184645).epsilon(1e-8));
  CHECK(c.m == doctest::Approx(9.8184645).epsilon(1e-8));
  CHECK(centering(1).m == doctest::Approx(kCStar));
  CHECK(kCStar == doctest::Approx(1.1774100226));
  CoverSample s{10, 62, std::nullopt, std::nullopt};
  CHECK(normalized_cover(s).second == doctest::Approx(std::sqrt(124.0) - c.m));
  CHECK(normalized_cover(s).second == doctest::Approx(1.317064).epsilon(1e-6));
  CHECK(std::isnan(normalized_cover(s).first));
  // C_n = 2^{n+1} m_n^2 centres to zero; use n = 2 where m_2 = c* - ln 2 / c*... times 2.
  const double m3 = centering(3).m;
  const auto steps = static_cast<std::uint64_t>(std::llround(16.0 * m3 * m3));
  CoverSample t{3, 1, steps, steps};
  CHECK(normalized_cover(t).first == doctest::Approx(std::sqrt(steps / 16.0) - m3));
  CHECK(std::fabs(normalized_cover(t).first) < 0.01);
}

TEST_CASE("caps and limits") {
  Rng g = make_stream(9, 6);
  CHECK_THROWS_AS(run_to_cover(6, g, false, 10), CapExceededError);
  CHECK_THROWS_AS(run_excursions(6, 100, g, 10), CapExceededError);
  CHECK_THROWS_AS(run_to_cover(kMaxSteppingDepth + 1, g), ResourceError);
  CHECK_THROWS_AS(run_excursions(3, 0, g), DomainError);
  CHECK(default_step_cap(0) == 5000);
}
