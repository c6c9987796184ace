#include <algorithm>
#include <bit>
#include <cmath>
#include <vector>

#include "check_util.hpp"
#include "covertree/alpha_ell.hpp"
#include "covertree/barrier_events.hpp"
#include "covertree/bessel_barrier.hpp"
#include "covertree/brw_martingale.hpp"
#include "covertree/excursion_gw.hpp"
#include "covertree/limit_law_stats.hpp"

namespace covertree {

using namespace detail;

namespace {

struct BridgeCase {
  double x, w;
  BarrierLine line;
};

const std::vector<BridgeCase>& bridge_cases() {
  static const std::vector<BridgeCase> cases{
      {1.0, 1.0, {0.0, 2.0, 0.0, 0.0}},   {0.5, 0.8, {0.0, 1.0, 0.0, 0.3}},
      {2.0, 0.5, {1.0, 4.0, 0.5, -1.0}},  {1.2, 3.0, {0.0, 0.5, 1.0, 2.5}},
      {0.3, 0.3, {0.0, 1.0, 0.0, 0.0}}};
  return cases;
}

std::string describe(const BridgeCase& c) {
  return "x=" + format_double(c.x) + " w=" + format_double(c.w) + " t=[" + format_double(c.line.t1) + "," +
         format_double(c.line.t2) + "] m=(" + format_double(c.line.m1) + "," + format_double(c.line.m2) + ")";
}

}  // namespace

SuiteResult check_bridge(const CheckOptions& opt) {
  SuiteResult out;
  const Split paths{opt.scaled(100000), 20};
  const double dt = 1e-3;
  for (std::size_t i = 0; i < bridge_cases().size(); ++i) {
    const auto& bc = bridge_cases()[i];
    progress(opt, "bridge: " + describe(bc));
    const auto hits = parallel_map(paths.chunks, opt.workers, [&](std::uint64_t c) {
      Rng rng = chunk_stream(opt, "bridge", c, i);
      return bridge_barrier_mc(bc.x, bc.w, bc.line, dt, paths.size(c), rng).hits;
    });
    std::uint64_t total = 0;
    for (auto h : hits) total += h;
    const double exact = bridge_barrier_prob(bc.x, bc.w, bc.line);
    const double p = static_cast<double>(total) / static_cast<double>(paths.total);
    auto c = sigma_check("bridge stays above the line: " + describe(bc), p,
                         std::sqrt(exact * (1 - exact) / static_cast<double>(paths.total)), exact,
                         opt.thresholds.sigma_closed_form);
    c.extra["paths"] = paths.total;
    c.extra["dt"] = dt;
    out.checks.push_back(c);
  }
  return out;
}

SuiteResult check_besq(const CheckOptions& opt) {
  SuiteResult out;
  const Split draws{opt.scaled(1000000), 20};
  struct Case {
    double z, s;
  };
  const double k = opt.thresholds.sigma_closed_form;
  const std::vector<Case> cases{{0.5, 1.0}, {2.0, 0.5}, {10.0, 3.0}};
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const auto [z, s] = cases[i];
    progress(opt, "besq: z=" + format_double(z) + " s=" + format_double(s));
    const auto parts = parallel_map(draws.chunks, opt.workers, [&](std::uint64_t c) {
      Rng rng = chunk_stream(opt, "besq", c, i);
      std::pair<RunningStats, RunningStats> r;
      for (std::uint64_t d = 0; d < draws.size(c); ++d) {
        const double next = besq0_step(z, s, rng);
        r.first.add(next > 0.0);
        r.second.add(next);
      }
      return r;
    });
    RunningStats alive, mean;
    for (const auto& p : parts) {
      alive.merge(p.first);
      mean.merge(p.second);
    }
    const std::string tag = " (z=" + format_double(z) + ", s=" + format_double(s) + ")";
    out.checks.push_back(sigma_check("BESQ(0) survival 1 - e^{-z/2s}" + tag, alive, besq0_survival(z, s), k));
    out.checks.push_back(sigma_check("BESQ(0) mean conservation E[Z_s] = z" + tag, mean, z, k));
  }
  progress(opt, "besq: three-step skeleton");
  const Split paths{opt.scaled(200000), 20};
  const auto parts = parallel_map(paths.chunks, opt.workers, [&](std::uint64_t c) {
    Rng rng = chunk_stream(opt, "besq/path", c);
    std::pair<RunningStats, RunningStats> r;
    for (std::uint64_t d = 0; d < paths.size(c); ++d) {
      const auto path = sample_bessel0(1.5, 3, rng);
      r.first.add(path.back() > 0.0);
      r.second.add(path.back() * path.back());
    }
    return r;
  });
  RunningStats alive, mean;
  for (const auto& p : parts) {
    alive.merge(p.first);
    mean.merge(p.second);
  }
  out.checks.push_back(sigma_check("Bessel-0 skeleton survives 3 unit steps from y=1.5", alive,
                                   besq0_survival(2.25, 3.0), k));
  out.checks.push_back(sigma_check("Bessel-0 skeleton E[Y_3^2] = y_0^2", mean, 2.25, k));
  return out;
}

namespace {

GirsanovSpec preset(double x, int horizon) {
  GirsanovSpec s;
  s.x = x;
  s.horizon = horizon;
  return s;
}

std::vector<GirsanovSpec> girsanov_presets() {
  std::vector<GirsanovSpec> specs{preset(1.0, 1), preset(2.0, 3), preset(10.0, 2), preset(50.0, 4)};
  // Doubled-psi barrier from the n = 12, ell = 4 geometry, read at levels 2..8.
  const auto geo = barrier_geometry({12, 4, 1.0});
  GirsanovSpec b = preset(14.0, 7);
  for (int t = 1; t <= 7; ++t) b.barrier.push_back(geo.phibar[t + 1] + 2 * geo.psi[t + 1]);
  specs.push_back(b);
  return specs;
}

}  // namespace

SuiteResult check_girsanov(const CheckOptions& opt) {
  SuiteResult out;
  const Split bessel{opt.scaled(100000), 20};
  const Split brownian{opt.scaled(20000), 20};
  const auto specs = girsanov_presets();
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const auto& spec = specs[i];
    const std::string tag = "x=" + format_double(spec.x) + " horizon=" + std::to_string(spec.horizon) +
                            (spec.barrier.empty() ? "" : " with barrier");
    progress(opt, "girsanov: " + tag);
    const auto parts = parallel_map(bessel.chunks, opt.workers, [&](std::uint64_t c) {
      Rng rng = chunk_stream(opt, "girsanov", c, i);
      return girsanov_check(spec, bessel.size(c), brownian.size(c), rng);
    });
    GirsanovReport r;
    for (const auto& p : parts) {
      r.bessel_side.merge(p.bessel_side);
      r.brownian_side.merge(p.brownian_side);
    }
    auto c = two_sample_check("Girsanov identity, " + tag, r.bessel_side.mean(), r.bessel_side.std_error(),
                              r.brownian_side.mean(), r.brownian_side.std_error(), opt.thresholds.sigma_closed_form);
    c.extra["bessel_paths"] = bessel.total;
    c.extra["brownian_paths"] = brownian.total;
    c.extra["dt"] = spec.dt;
    if (spec.barrier.empty()) c.extra["closed_form"] = besq0_survival(spec.x * spec.x, spec.horizon);
    out.checks.push_back(c);
  }
  return out;
}

SuiteResult check_martingale(const CheckOptions& opt) {
  SuiteResult out;
  const double k = opt.thresholds.sigma_probability;
  const Split outer{opt.scaled(10000), 20};
  const std::uint64_t inner = 1000;
  progress(opt, "martingale: nested deviation at k=3");
  const auto parts = parallel_map(outer.chunks, opt.workers, [&](std::uint64_t c) {
    Rng rng = chunk_stream(opt, "martingale/nested", c);
    return martingale_check(3, outer.size(c), inner, rng).deviation;
  });
  RunningStats dev;
  for (const auto& p : parts) dev.merge(p);
  auto c = sigma_check("E[X_4 | F_3] - X_3 = 0", dev, 0.0, k);
  c.extra["outer"] = outer.total;
  c.extra["inner"] = inner;
  out.checks.push_back(c);

  progress(opt, "martingale: Cov(g_u, gbar_5)");
  const Split five{opt.scaled(100000), 20};
  const auto cov_parts = parallel_map(five.chunks, opt.workers, [&](std::uint64_t c) {
    Rng rng = chunk_stream(opt, "martingale/cov", c);
    std::vector<RunningStats> cov(32);
    RunningStats gbar_sq;
    for (std::uint64_t i = 0; i < five.size(c); ++i) {
      const auto s = sample_brw(5, rng);
      for (int u = 0; u < 32; ++u) cov[u].add(s.g[u] * s.m.gbar);
      gbar_sq.add(s.m.gbar * s.m.gbar);
    }
    cov.push_back(gbar_sq);
    return cov;
  });
  const double sigma5 = 1.0 - std::ldexp(1.0, -5);
  for (int u = 0; u < 32; ++u) {
    RunningStats s;
    for (const auto& p : cov_parts) s.merge(p[u]);
    out.checks.push_back(sigma_check("Cov(g_u, gbar_5) = 1 - 2^-5 (u=" + std::to_string(u) + ")", s, sigma5, k));
  }
  RunningStats var5;
  for (const auto& p : cov_parts) var5.merge(p[32]);
  out.checks.push_back(sigma_check("Var(gbar_5) = 1 - 2^-5", var5, sigma5, k));

  progress(opt, "martingale: Var(gbar_1)");
  const Split one{opt.scaled(1000000), 20};
  const auto var_parts = parallel_map(one.chunks, opt.workers, [&](std::uint64_t c) {
    Rng rng = chunk_stream(opt, "martingale/var1", c);
    RunningStats s;
    for (std::uint64_t i = 0; i < one.size(c); ++i) {
      const double g = sample_brw(1, rng).m.gbar;
      s.add(g * g);
    }
    return s;
  });
  RunningStats var1;
  for (const auto& p : var_parts) var1.merge(p);
  out.checks.push_back(sigma_check("Var(gbar_1) = 1/2", var1, 0.5, k));
  return out;
}

SuiteResult check_alpha(const CheckOptions& opt) {
  SuiteResult out;
  const Split samples{opt.scaled(100000), 20};
  std::vector<AlphaEstimate> est;
  std::vector<std::vector<std::uint64_t>> tstar;
  for (int ell : {6, 8, 10}) {
    progress(opt, "alpha: t* samples at ell=" + std::to_string(ell));
    const auto parts = parallel_map(samples.chunks, opt.workers, [&](std::uint64_t c) {
      Rng rng = chunk_stream(opt, "alpha", c, static_cast<std::uint64_t>(ell));
      TStarSampler sampler(ell);
      std::vector<std::uint64_t> t;
      for (std::uint64_t i = 0; i < samples.size(c); ++i) t.push_back(sampler.sample(rng).t_star);
      return t;
    });
    std::vector<std::uint64_t> t;
    for (const auto& p : parts) t.insert(t.end(), p.begin(), p.end());
    est.push_back(alpha_ell_from_tstar(ell, t));
    tstar.push_back(std::move(t));
    const auto& a = est.back();
    const std::string tag = " (ell=" + std::to_string(ell) + ")";
    auto c = at_least("alpha_ell strictly positive" + tag, a.alpha - 4 * a.std_error, 0.0);
    c.extra["alpha"] = a.alpha;
    c.extra["std_error"] = a.std_error;
    c.extra["quadrature_error"] = a.quadrature_error;
    c.extra["tail_bound"] = a.tail_bound;
    out.checks.push_back(c);
    out.checks.push_back(at_most("share of the integral outside [sqrt(l)/(2r), 2r sqrt(l)]" + tag, a.outside_support, 0.01));
  }
  double lo = est[0].alpha, hi = est[0].alpha;
  for (const auto& a : est) {
    lo = std::min(lo, a.alpha);
    hi = std::max(hi, a.alpha);
  }
  auto c = at_most("alpha_6, alpha_8, alpha_10 within a factor 3", hi / lo, 3.0);
  c.informational = true;
  out.checks.push_back(c);

  // The exact Poisson sum over the ECDF against direct simulation of gamma~.
  progress(opt, "alpha: direct gamma~ at ell=6");
  const TStarSurvival surv(tstar[0]);
  const Split direct{opt.scaled(40000), 20};
  for (double y : {1.0, 2.0, 3.0}) {
    const auto hits = parallel_map(direct.chunks, opt.workers, [&](std::uint64_t ch) {
      Rng rng = chunk_stream(opt, "alpha/direct", ch, std::bit_cast<std::uint64_t>(y));
      return gamma_tilde_mc(6, y, direct.size(ch), rng).hits;
    });
    std::uint64_t h = 0;
    for (auto v : hits) h += v;
    const double mc = static_cast<double>(h) / static_cast<double>(direct.total);
    const double exact = gamma_tilde(6, y, surv);
    out.checks.push_back(two_sample_check("gamma~_6(" + format_double(y) + "): Poisson sum vs direct", exact,
                                          std::sqrt(exact * (1 - exact) / static_cast<double>(surv.size())), mc,
                                          std::sqrt(mc * (1 - mc) / static_cast<double>(direct.total)),
                                          opt.thresholds.sigma_probability));
  }
  return out;
}

}  // namespace covertree
