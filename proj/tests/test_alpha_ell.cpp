#include "doctest.h"

#include <cmath>
#include <numbers>
#include <vector>

#include "covertree/alpha_ell.hpp"
#include "covertree/centering.hpp"
#include "covertree/errors.hpp"
#include "covertree/excursion_gw.hpp"

using namespace covertree;

namespace {

std::vector<std::uint64_t> tstar_samples(int ell, int count, Rng& rng) {
  TStarSampler sampler(ell);
  std::vector<std::uint64_t> out;
  for (int i = 0; i < count; ++i) out.push_back(sampler.sample(rng).t_star);
  return out;
}

}  // namespace

TEST_CASE("window intensity") {
  CHECK(lambda_ell(4, 0.0) == doctest::Approx(0.5 * 16 * kCStar * kCStar));
  CHECK(lambda_ell(4, 1.5) == doctest::Approx(0.5 * std::pow(4 * kCStar + 1.5, 2)));
}

TEST_CASE("empirical t* survival") {
  const TStarSurvival s({3, 5, 5, 9});
  CHECK(s(0) == 1.0);
  CHECK(s(3) == 0.75);
  CHECK(s(5) == 0.25);
  CHECK(s(9) == 0.0);
  CHECK_THROWS_AS(TStarSurvival({}), DataError);
}

TEST_CASE("gamma-tilde is bounded by the window probability") {
  const TStarSurvival never({1000000});
  const TStarSurvival always({0});
  for (double y : {0.0, 1.0, 2.5, 5.0}) {
    CHECK(gamma_tilde(6, y, never) == doctest::Approx(window_probability(6, y)).epsilon(1e-12));
    CHECK(gamma_tilde(6, y, always) == 0.0);
    CHECK(window_probability(6, y) <= 1.0);
  }
  CHECK_THROWS_AS(window_probability(1, 0.0), DomainError);
}

TEST_CASE("exact sum against direct simulation") {
  Rng g = make_stream(14, 1);
  const int ell = 6;
  const TStarSurvival surv(tstar_samples(ell, 50000, g));
  for (double y : {1.0, 2.0}) {
    const double exact = gamma_tilde(ell, y, surv);
    const auto mc = gamma_tilde_mc(ell, y, 40000, g);
    // The ECDF adds error of the same order as the direct estimate.
    const double se = std::hypot(mc.std_error(), std::sqrt(exact * (1 - exact) / 50000.0));
    CHECK(std::fabs(mc.p - exact) < 4 * se);
  }
}

TEST_CASE("alpha of trivial integrands") {
  const auto zero = alpha_ell(6, [](double) { return 0.0; });
  CHECK(zero.alpha == 0.0);
  CHECK(zero.quadrature_error == 0.0);

  // Constant gamma-tilde: integral of y e^{c y} on [0, Y] in closed form.
  const int ell = 4;
  const AlphaGrid grid{0.0, 3.0, 0.01};
  const auto one = alpha_ell(ell, [](double) { return 1.0; }, grid);
  const double c = kCStar, Y = 3.0;
  const double integral = std::exp(c * Y) * (Y / c - 1 / (c * c)) + 1 / (c * c);
  CHECK(one.alpha == doctest::Approx(integral / std::sqrt(std::numbers::pi * ell)).epsilon(1e-4));
  CHECK(one.y.size() == one.gamma.size());
  CHECK(one.tail_bound > 0.0);

  const AlphaGrid coarse{0.0, 6.0, 0.5};
  CHECK_THROWS_AS(alpha_ell(ell, [](double y) { return std::exp(-50 * (y - 3) * (y - 3)); }, coarse),
                  AccuracyError);
  CHECK_THROWS_AS(alpha_ell(ell, [](double) { return 1.0; }, AlphaGrid{1.0, 1.0, 0.1}), DomainError);
}

TEST_CASE("alpha from t* samples") {
  Rng g = make_stream(14, 2);
  for (int ell : {6, 8}) {
    const auto t = tstar_samples(ell, 20000, g);
    const auto a = alpha_ell_from_tstar(ell, t);
    CHECK(a.alpha > 0.0);
    CHECK(a.std_error > 0.0);
    CHECK(a.std_error < 0.2 * a.alpha);
    CHECK(a.outside_support < 0.01);
    CHECK(a.quadrature_error < 1e-3);
    CHECK(a.tail_bound < 1e-3 * a.alpha);
  }
}
