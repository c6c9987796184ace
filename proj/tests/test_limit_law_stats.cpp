#include "doctest.h"

#include <cmath>
#include <vector>

#include "covertree/brw_martingale.hpp"
#include "covertree/centering.hpp"
#include "covertree/distributions.hpp"
#include "covertree/errors.hpp"
#include "covertree/limit_law_stats.hpp"

using namespace covertree;

namespace {

std::vector<double> normals(std::size_t n, double mean, double sd, Rng& rng) {
  std::vector<double> out(n);
  for (auto& v : out) v = mean + sd * standard_normal(rng);
  return out;
}

std::vector<double> gumbels(std::size_t n, Rng& rng) {
  std::vector<double> out(n);
  for (auto& v : out) v = -std::log(-std::log(uniform01(rng)));
  return out;
}

}  // namespace

TEST_CASE("centering constants") {
  CHECK(kCStar == doctest::Approx(1.1774100225154747).epsilon(1e-15));
  CHECK(centering(10).rho == doctest::Approx(0.98184645).epsilon(1e-8));
  CHECK(centering(1).m == doctest::Approx(kCStar).epsilon(1e-15));
  CHECK_THROWS_AS(centering(0), DomainError);
}

TEST_CASE("empirical distribution") {
  const EmpiricalDistribution d({3.0, 1.0, 2.0, 2.0});
  CHECK(d.cdf(0.5) == 0.0);
  CHECK(d.cdf(2.0) == 0.75);
  CHECK(d.survival(2.0) == 0.25);
  CHECK(d.count_above(1.0) == 3);
  CHECK(d.quantile(0.0) == 1.0);
  CHECK(d.quantile(1.0) == 3.0);
  CHECK(d.quantile(0.5) == 2.0);
  CHECK(d.mean() == 2.0);
  CHECK_THROWS_AS(EmpiricalDistribution({}), DataError);
  CHECK_THROWS_AS(EmpiricalDistribution({1.0, NAN}), DataError);
}

TEST_CASE("two-sample KS") {
  Rng g = make_stream(15, 1);
  const auto x = normals(1000, 0, 1, g);
  const EmpiricalDistribution a(x);
  CHECK(ks_two_sample(a, a).statistic == 0.0);
  CHECK(ks_two_sample(a, a).p_value == 1.0);
  const EmpiricalDistribution far(normals(1000, 100, 1, g));
  CHECK(ks_two_sample(a, far).statistic == 1.0);
  CHECK(ks_two_sample(a, far).p_value < 1e-10);
  CHECK(kolmogorov_q(0.0) == 1.0);
  // Both branches of the series meet at the switch point.
  CHECK(kolmogorov_q(1.18 - 1e-9) == doctest::Approx(kolmogorov_q(1.18)).epsilon(1e-6));
  CHECK(kolmogorov_q(1.3581) == doctest::Approx(0.05).epsilon(1e-3));
}

TEST_CASE("KS calibration under the null") {
  Rng g = make_stream(15, 2);
  int rejected = 0;
  for (int rep = 0; rep < 200; ++rep) {
    const EmpiricalDistribution a(normals(10000, 0, 1, g)), b(normals(10000, 0, 1, g));
    rejected += ks_two_sample(a, b).p_value < 0.05;
  }
  // Binomial(200, 0.05): mean 10, sd 3.1.
  CHECK(rejected >= 2);
  CHECK(rejected <= 20);
}

TEST_CASE("chi-square two-sample") {
  std::vector<std::uint64_t> a, b;
  for (std::uint64_t k = 0; k < 5; ++k)
    for (int i = 0; i < 100; ++i) {
      a.push_back(k);
      b.push_back(k);
    }
  const auto same = chi_square_two_sample(tabulate(a, b));
  CHECK(same.statistic == 0.0);
  CHECK(same.p_value == 1.0);
  CHECK(same.dof == 4);
  std::vector<std::uint64_t> c(500, 7);
  CHECK(chi_square_two_sample(tabulate(a, c)).p_value < 1e-10);
  // Sparse categories are pooled.
  a.push_back(99);
  const auto pooled = chi_square_two_sample(tabulate(a, b));
  CHECK(pooled.categories == 6);
  CHECK(pooled.p_value > 0.5);
  CHECK_THROWS_AS(chi_square_two_sample(tabulate(a, {})), DataError);
}

TEST_CASE("tail fit recovers the injected law") {
  Rng g = make_stream(15, 3);
  struct Preset {
    double alpha, c;
  };
  for (const auto& p : {Preset{1.0, kCStar}, Preset{2.0, 1.0}, Preset{0.5, 1.5}}) {
    const EmpiricalDistribution d(sample_exact_tail(100000, p.alpha, p.c, g));
    // Above the peak 1 / c the law is exactly alpha z e^{-c z}.
    const auto fit = tail_fit(d, 1.0, 4.0);
    CHECK(std::fabs(fit.c - p.c) < 2 * fit.c_se);
    CHECK(fit.c_se < 0.05);
  }
}

TEST_CASE("tail fit refuses thin windows") {
  Rng g = make_stream(15, 4);
  const EmpiricalDistribution d(sample_exact_tail(1000, 1.0, kCStar, g));
  CHECK_THROWS_AS(tail_fit(d, 50.0, 60.0), AccuracyError);
  CHECK_THROWS_AS(tail_fit(d, 2.0, 1.0), DomainError);
}

TEST_CASE("mixture CDF") {
  Rng g = make_stream(15, 5);
  std::vector<double> x;
  for (const auto& m : sample_xprime_stream(10, 2000, g)) x.push_back(m.x_prime);
  const MixtureCdf unit(1.0, kCStar, x);
  CHECK(unit(20.0 / kCStar) > 0.999);
  CHECK(unit(-20.0 / kCStar) < 1e-3);
  CHECK(unit(0.0) < unit(1.0));
  CHECK(unit.excluded_fraction() < 0.05);
  const MixtureCdf none(0.0, kCStar, x);
  CHECK(none(-5.0) == 1.0);
  CHECK(none(5.0) == 1.0);

  const std::vector<double> negative{-1.0, -0.5, 0.0};
  CHECK_THROWS_AS(MixtureCdf(1.0, kCStar, negative), DataError);
  const EmpiricalDistribution d({0.0, 1.0, 2.0});
  CHECK_THROWS_AS(mixture_cdf_fit(d, negative), DataError);
}

TEST_CASE("mixture fit on its own samples") {
  Rng g = make_stream(15, 6);
  std::vector<double> x;
  for (const auto& m : sample_xprime_stream(10, 2000, g)) x.push_back(m.x_prime);
  for (double alpha : {1.0, 3.0}) {
    const MixtureCdf truth(alpha, kCStar, x);
    std::vector<double> y;
    for (int i = 0; i < 5000; ++i) y.push_back(truth.sample(g));
    const auto fit = mixture_cdf_fit(EmpiricalDistribution(y), x);
    CHECK(std::fabs(std::log(fit.alpha / alpha)) < 0.1);
    // 1% critical value of the one-sample KS statistic at N = 5000.
    CHECK(fit.ks < 1.63 / std::sqrt(5000.0));
  }
}

TEST_CASE("shift test") {
  const Provenance n10{10, "cover"}, n12{12, "tstar"};
  Rng g = make_stream(15, 7);
  const auto cover = gumbels(5000, g);
  Rng copy = g;
  const EmpiricalDistribution sorted(cover);
  std::vector<double> same;
  for (double v : sorted.values()) same.push_back(v - standard_normal(copy));
  const auto exact = shift_test(EmpiricalDistribution(cover, n10), EmpiricalDistribution(same, n10), g);
  CHECK(exact.shifted.statistic == 0.0);

  int control_rejects = 0, shifted_rejects = 0;
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<double> t;
    for (double v : gumbels(10000, g)) t.push_back(v - standard_normal(g));
    const auto r = shift_test(EmpiricalDistribution(gumbels(10000, g), n10), EmpiricalDistribution(t, n10), g);
    control_rejects += r.control.p_value < 0.05;
    shifted_rejects += r.shifted.p_value < 0.05;
  }
  CHECK(control_rejects >= 95);
  CHECK(shifted_rejects <= 15);
  CHECK_THROWS_AS(shift_test(EmpiricalDistribution(cover, n10), EmpiricalDistribution(same, n12), g),
                  DomainError);
}
