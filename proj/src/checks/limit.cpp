#include <algorithm>
#include <cmath>
#include <vector>

#include "check_util.hpp"
#include "covertree/barrier_events.hpp"
#include "covertree/centering.hpp"
#include "covertree/distributions.hpp"
#include "covertree/limit_law_stats.hpp"
#include "covertree/simulate.hpp"

namespace covertree {

using namespace detail;

namespace {

RunConfig sample_config(const CheckOptions& opt, std::string kind, int n, std::uint64_t replicas) {
  RunConfig cfg;
  cfg.command = "simulate";
  cfg.kind = std::move(kind);
  cfg.n = n;
  cfg.replicas = replicas;
  cfg.seed = opt.seed;
  cfg.workers = opt.workers;
  return cfg;
}

struct Column {
  std::vector<double> values;
  std::uint64_t capped = 0;
};

Column sample_column(const RunConfig& cfg, std::string_view name) {
  const SampleFile f = simulate_rows(cfg);
  Column c;
  c.values = column(f, name);
  c.capped = f.rows.size() - c.values.size();
  return c;
}

}  // namespace

SuiteResult check_limit_law(const CheckOptions& opt) {
  SuiteResult out;
  const auto& th = opt.thresholds;
  const std::uint64_t per_n = opt.scaled(20000);
  std::vector<EmpiricalDistribution> tstar;
  for (int n : {10, 12, 14}) {
    progress(opt, "limit-law: " + std::to_string(per_n) + " t* samples at n=" + std::to_string(n));
    const auto col = sample_column(sample_config(opt, "tstar", n, per_n), "y_tstar");
    tstar.emplace_back(col.values, Provenance{n, "tstar", opt.seed, 0, per_n});
    if (col.capped) out.checks.push_back(at_most("t* rows over the excursion cap (n=" + std::to_string(n) + ")", static_cast<double>(col.capped), 0));
  }
  std::vector<double> ks;
  for (int i = 0; i + 1 < 3; ++i) {
    const auto r = ks_two_sample(tstar[i], tstar[i + 1]);
    ks.push_back(r.statistic);
    auto c = at_most("KS(sqrt(2 t*_n) - m_n) between n=" + std::to_string(tstar[i].provenance().n) + " and n=" +
                         std::to_string(tstar[i + 1].provenance().n),
                     r.statistic, th.ks_stability);
    c.extra["p_value"] = r.p_value;
    c.extra["mean_lo_n"] = tstar[i].mean();
    c.extra["mean_hi_n"] = tstar[i + 1].mean();
    out.checks.push_back(c);
  }
  // Monotone or flat up to the 5% KS noise level of the two comparisons.
  const double noise = 1.36 * std::sqrt(2.0 / static_cast<double>(per_n));
  auto mono = at_most("consecutive KS distances monotone or flat", ks[1], ks[0] + noise);
  mono.informational = true;
  out.checks.push_back(mono);

  progress(opt, "limit-law: tail fit at n=12");
  const auto tail = tail_fit(tstar[1], 1.0, 3.5);
  auto c = in_range("tail fit c-hat, n=12, window z in [1, 3.5]", tail.c, th.tail_c_lo, th.tail_c_hi);
  c.extra["c_star"] = kCStar;
  c.extra["c_se"] = tail.c_se;
  c.extra["alpha"] = tail.alpha;
  c.extra["points"] = tail.z.size();
  out.checks.push_back(c);

  const std::uint64_t xcount = opt.scaled(10000);
  progress(opt, "limit-law: " + std::to_string(xcount) + " X'_16 samples");
  const auto xprime = sample_column(sample_config(opt, "brw_xprime", 16, xcount), "x_prime").values;
  // t*-scale data carries the extra Gaussian shift of the occupation field, so
  // its mixing weights are X' e^{-c* G} with G ~ N(0, 1) independent.
  std::vector<double> tilted(xprime.size());
  Rng tilt = chunk_stream(opt, "limit/tilt", 0);
  for (std::size_t i = 0; i < xprime.size(); ++i) tilted[i] = xprime[i] * std::exp(-kCStar * standard_normal(tilt));
  const auto fit = mixture_cdf_fit(tstar[1], tilted);
  c = at_most("mixture fit KS at n=12 with X'_16 weights", fit.ks, th.ks_mixture);
  c.extra["alpha"] = fit.alpha;
  c.extra["excluded_fraction"] = fit.excluded_fraction;
  out.checks.push_back(c);
  const auto plain = mixture_cdf_fit(tstar[1], xprime);
  c = at_most("mixture fit KS at n=12 with untilted X'_16 weights", plain.ks, th.ks_mixture);
  c.informational = true;
  c.extra["alpha"] = plain.alpha;
  out.checks.push_back(c);

  const std::uint64_t shift_n = opt.scaled(10000);
  progress(opt, "limit-law: " + std::to_string(shift_n) + " cover times at n=10");
  const auto cover = sample_column(sample_config(opt, "cover", 10, shift_n), "y_cover");
  if (cover.capped) out.checks.push_back(at_most("cover rows over the step cap", static_cast<double>(cover.capped), 0));
  const EmpiricalDistribution cover_d(cover.values, Provenance{10, "cover", opt.seed, 0, shift_n});
  // Replicas 0..shift_n-1 of the n=10 t* run above.
  const auto t10 = sample_column(sample_config(opt, "tstar", 10, shift_n), "y_tstar").values;
  const EmpiricalDistribution tstar_d(t10, Provenance{10, "tstar", opt.seed, 0, shift_n});
  Rng shift_rng = chunk_stream(opt, "limit/shift", 0);
  const auto sh = shift_test(cover_d, tstar_d, shift_rng);
  c = at_most("shift test KS(cover - N(0,1), t*) at n=10", sh.shifted.statistic, th.ks_shift);
  c.extra["p_value"] = sh.shifted.p_value;
  c.extra["control_statistic"] = sh.control.statistic;
  out.checks.push_back(c);
  c = at_most("negative control N(0, 0.25) rejected at 1%", sh.control.p_value, 0.01);
  c.extra["control_statistic"] = sh.control.statistic;
  c.extra["shifted_statistic"] = sh.shifted.statistic;
  c.pass = c.pass && sh.control.statistic > sh.shifted.statistic;
  c.rule = "control p-value <= 0.01 and control KS > shifted KS";
  out.checks.push_back(c);
  return out;
}

namespace {

/// (z + h) e^{-c*(z + h)} e^{-(z + h)^2 / (8n)}.
double g_shape(double z, double h, int n) {
  const double a = z + h;
  return a * std::exp(-kCStar * a) * std::exp(-a * a / (8.0 * n));
}

}  // namespace

SuiteResult check_barrier(const CheckOptions& opt) {
  SuiteResult out;
  const int n = 12, ell = 4;
  const std::uint64_t reps = opt.scaled(100000);
  const double k = opt.thresholds.sigma_closed_form;
  std::vector<ProportionEstimate> g_prob;
  std::vector<double> shape;
  std::uint64_t violations = 0, total_rows = 0;
  RunningStats lambda_z1;
  for (double z : {1.0, 2.0, 3.0}) {
    progress(opt, "barrier: " + std::to_string(reps) + " replicas at z=" + format_double(z));
    RunConfig cfg = sample_config(opt, "event", n, reps);
    cfg.ell = ell;
    cfg.z = z;
    const SampleFile f = simulate_rows(cfg);
    RunningStats unc, lam, lam2, d;
    std::uint64_t g_hits = 0;
    for (const auto& r : f.rows) {
      const double l = r.number("lambda");
      const bool u = r.number("uncovered") != 0.0;
      violations += l >= 1 && !u;
      unc.add(u);
      lam.add(l);
      lam2.add(l * (l - 1));
      d.add((u ? 1.0 : 0.0) - l + l * (l - 1));
      g_hits += r.number("g_event") != 0.0;
    }
    total_rows += f.rows.size();
    if (z == 1.0) lambda_z1 = lam;
    const std::string tag = " (z=" + format_double(z) + ")";
    CheckResult c;
    c.name = "P(eta# = 0) >= E[Lambda] - E[Lambda(Lambda-1)]" + tag;
    c.observed = unc.mean();
    c.expected = lam.mean() - lam2.mean();
    c.tolerance = k * d.std_error();
    c.pass = c.observed - c.expected >= -c.tolerance;
    c.rule = "observed >= expected - " + format_double(k) + " sigma of the per-replica difference";
    c.extra["E_lambda"] = lam.mean();
    c.extra["E_lambda_se"] = lam.std_error();
    c.extra["E_lambda_lambda_minus_1"] = lam2.mean();
    out.checks.push_back(c);
    if (z == 2.0) {
      auto pos = at_least("E[Lambda] > 0" + tag + ", lower 4-sigma bound", lam.mean() - 4 * lam.std_error(), 0.0);
      pos.pass = pos.observed > 0.0;
      pos.rule = "observed > 0";
      out.checks.push_back(pos);
    }
    g_prob.push_back(estimate_proportion(g_hits, f.rows.size()));
    const auto geo = barrier_geometry({n, ell, z});
    shape.push_back(g_shape(z, geo.h, n));
  }
  auto c = at_most("Lambda >= 1 implies an unvisited leaf (violations)", static_cast<double>(violations), 0);
  c.extra["replicas"] = total_rows;
  out.checks.push_back(c);

  // Smallest constant that covers z = 1 (upper confidence end), then the
  // bound must still hold at z = 2, 3 (lower confidence ends).
  const double c_hat = g_prob[0].ci.hi / shape[0];
  for (std::size_t i = 1; i < g_prob.size(); ++i) {
    auto g = at_most("P(G) <= c-hat (z+h) e^{-c*(z+h)} e^{-(z+h)^2/8n} (z=" + std::to_string(i + 1) + ")",
                     g_prob[i].ci.lo, c_hat * shape[i]);
    g.extra["p_hat"] = g_prob[i].p;
    g.extra["c_hat"] = c_hat;
    g.extra["shape"] = shape[i];
    g.rule = "lower 95% end of P-hat(G) <= c-hat * shape, c-hat fitted at z=1";
    out.checks.push_back(g);
  }

  progress(opt, "barrier: per-vertex E event along one geodesic");
  const auto geo = barrier_geometry({n, ell, 1.0});
  const Split paths{opt.scaled(200000), 20};
  const auto hits = parallel_map(paths.chunks, opt.workers, [&](std::uint64_t ch) {
    Rng rng = chunk_stream(opt, "barrier/event", ch);
    return estimate_event(event_E(geo), paths.size(ch), rng).per_vertex.hits;
  });
  std::uint64_t h = 0;
  for (auto v : hits) h += v;
  const auto per_vertex = estimate_proportion(h, paths.total);
  const double scale = std::ldexp(1.0, geo.n_prime);
  out.checks.push_back(two_sample_check("2^{n'} P(E(u)) = E[Lambda] (z=1)", scale * per_vertex.p,
                                        scale * per_vertex.std_error(), lambda_z1.mean(), lambda_z1.std_error(),
                                        opt.thresholds.sigma_probability));
  return out;
}

}  // namespace covertree
