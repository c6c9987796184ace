#include "doctest.h"

#include <vector>

#include "covertree/distributions.hpp"
#include "covertree/mc_stats.hpp"
#include "covertree/rng.hpp"
#include "stat_helpers.hpp"

using namespace covertree;

namespace {

template <class F>
std::pair<RunningStats, std::vector<double>> draw(F&& f, int count) {
  RunningStats s;
  std::vector<double> v;
  for (int i = 0; i < count; ++i) {
    const double x = static_cast<double>(f());
    s.add(x);
    v.push_back(x);
  }
  return {s, v};
}

}  // namespace

TEST_CASE("uniform01 stays inside the open unit interval") {
  Rng g = make_stream(3, 0);
  double lo = 1.0, hi = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = uniform01(g);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
  }
  CHECK(lo > 0.0);
  CHECK(hi < 1.0);
}

TEST_CASE("geometric laws") {
  Rng g = make_stream(11, 1);
  // Failures before success at p: mean (1-p)/p, variance (1-p)/p^2.
  auto [h, hv] = draw([&] { return geometric_half(g); }, 200000);
  CHECK(within_sigma(h, 1.0, 4));
  auto vh = variance_with_error(hv);
  CHECK(std::fabs(vh.variance - 2.0) < 4 * vh.std_error);

  auto [t, tv] = draw([&] { return geometric(g, 1.0 / 3.0); }, 200000);
  CHECK(within_sigma(t, 2.0, 4));
  auto vt = variance_with_error(tv);
  CHECK(std::fabs(vt.variance - 6.0) < 4 * vt.std_error);
  CHECK(geometric(g, 1.0) == 0);
}

TEST_CASE("binomial_half") {
  Rng g = make_stream(11, 2);
  CHECK(binomial_half(g, 0) == 0);
  for (std::uint64_t trials : {1ull, 7ull, 64ull, 150ull}) {
    auto [s, v] = draw([&] { return binomial_half(g, trials); }, 50000);
    CHECK(within_sigma(s, 0.5 * static_cast<double>(trials), 4));
    auto var = variance_with_error(v);
    // For one trial m4 = var^2 and the error estimate degenerates to 0.
    CHECK(std::fabs(var.variance - 0.25 * static_cast<double>(trials)) < 4 * var.std_error + 1e-4);
  }
}

TEST_CASE("gamma moments across shapes") {
  Rng g = make_stream(11, 3);
  CHECK(gamma(g, 0.0) == 0.0);
  for (double shape : {0.3, 1.0, 2.5, 40.0, 1000.0}) {
    auto [s, v] = draw([&] { return gamma(g, shape, 2.0); }, 100000);
    CHECK(within_sigma(s, 2.0 * shape, 4));
    auto var = variance_with_error(v);
    CHECK(std::fabs(var.variance - 4.0 * shape) < 4 * var.std_error);
  }
  CHECK_THROWS_AS(gamma(g, -1.0), DomainError);
}

TEST_CASE("poisson moments on both sides of the method switch") {
  Rng g = make_stream(11, 4);
  CHECK(poisson(g, 0.0) == 0);
  for (double mean : {0.2, 3.0, 9.9, 10.0, 57.0, 1e4}) {
    auto [s, v] = draw([&] { return poisson(g, mean); }, 100000);
    CHECK(within_sigma(s, mean, 4));
    auto var = variance_with_error(v);
    CHECK(std::fabs(var.variance - mean) < 4 * var.std_error);
  }
  CHECK_THROWS_AS(poisson(g, 1e30), ArithmeticError);
}

TEST_CASE("poisson point probabilities at mean 30") {
  Rng g = make_stream(11, 5);
  const int draws = 200000;
  int at30 = 0;
  for (int i = 0; i < draws; ++i) at30 += poisson(g, 30.0) == 30;
  const double p = std::exp(30 * std::log(30.0) - 30.0 - std::lgamma(31.0));
  const double se = std::sqrt(p * (1 - p) / draws);
  CHECK(std::fabs(at30 / static_cast<double>(draws) - p) < 4 * se);
}

TEST_CASE("negative binomial") {
  Rng g = make_stream(11, 6);
  // NB(r, p) failures: mean r(1-p)/p, variance r(1-p)/p^2.
  auto [s, v] = draw([&] { return negative_binomial(g, 20.0, 0.5); }, 100000);
  CHECK(within_sigma(s, 20.0, 4));
  auto var = variance_with_error(v);
  CHECK(std::fabs(var.variance - 40.0) < 4 * var.std_error);
  auto [s2, v2] = draw([&] { return negative_binomial(g, 7.0, 2.0 / 3.0); }, 100000);
  CHECK(within_sigma(s2, 3.5, 4));
}

TEST_CASE("standard normal") {
  Rng g = make_stream(11, 7);
  std::vector<double> x(200001);
  fill_standard_normal(g, x);
  RunningStats s;
  for (double v : x) s.add(v);
  CHECK(within_sigma(s, 0.0, 4));
  auto var = variance_with_error(x);
  CHECK(std::fabs(var.variance - 1.0) < 4 * var.std_error);
}

TEST_CASE("proportion intervals") {
  const auto e = estimate_proportion(0, 1000);
  CHECK(e.one_sided);
  CHECK(e.ci.lo == 0.0);
  CHECK(e.ci.hi == doctest::Approx(1.0 - std::pow(0.05, 1e-3)));
  const auto w = estimate_proportion(50, 100);
  CHECK(w.ci.lo == doctest::Approx(0.4038).epsilon(1e-3));
  CHECK(w.ci.hi == doctest::Approx(0.5962).epsilon(1e-3));
  std::vector<double> ones(1000, 1e-3);
  CHECK(pairwise_sum(ones) == doctest::Approx(1.0).epsilon(1e-14));
}
