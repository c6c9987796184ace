#include <algorithm>
#include <cmath>
#include <vector>

#include "check_util.hpp"
#include "covertree/bessel_barrier.hpp"
#include "covertree/brw_martingale.hpp"
#include "covertree/excursion_gw.hpp"
#include "covertree/limit_law_stats.hpp"
#include "covertree/oracles.hpp"
#include "covertree/srw_engine.hpp"

namespace covertree {

using namespace detail;

SuiteResult check_identities(const CheckOptions& opt) {
  SuiteResult out;
  progress(opt, "identities: step accounting");
  // Runs alternate between fixed-horizon and run-to-cover trajectories over n = 0..8.
  struct Tally {
    std::uint64_t runs = 0, step_violations = 0, root_violations = 0, gw_root_violations = 0;
  };
  const Split runs{opt.scaled(1000), 50};
  const auto tallies = parallel_map(runs.chunks, opt.workers, [&](std::uint64_t c) {
    Rng rng = chunk_stream(opt, "identities/steps", c);
    Tally t;
    for (std::uint64_t i = 0; i < runs.size(c); ++i) {
      const int n = static_cast<int>((c + i) % 9);
      const std::uint64_t s = 1 + (c * 7 + i) % 23;
      if (i % 2 == 0) {
        const auto run = run_excursions(n, s, rng);
        t.step_violations += run.steps != 2 * run.counts.total();
        t.root_violations += run.counts.count_by_id(1) != s;
      } else {
        const auto run = run_to_cover(n, rng, true);
        t.step_violations += *run.sample.steps_at_s != 2 * run.counts->total();
        t.root_violations += run.counts->count_by_id(1) != run.sample.t_star;
      }
      t.gw_root_violations += sample_counts(n, s, rng).count_by_id(1) != s;
      ++t.runs;
    }
    return t;
  });
  Tally total;
  for (const auto& t : tallies) {
    total.runs += t.runs;
    total.step_violations += t.step_violations;
    total.root_violations += t.root_violations;
    total.gw_root_violations += t.gw_root_violations;
  }
  auto c = at_most("steps = 2^{n+1} R_n^s on every trajectory (n <= 8)", static_cast<double>(total.step_violations), 0);
  c.extra["trajectories"] = total.runs;
  out.checks.push_back(c);
  c = at_most("T_{v,0} = s on every walk trajectory", static_cast<double>(total.root_violations), 0);
  c.extra["trajectories"] = total.runs;
  out.checks.push_back(c);
  c = at_most("T_{v,0} = s on every branching-process tree", static_cast<double>(total.gw_root_violations), 0);
  out.checks.push_back(c);

  progress(opt, "identities: X' tilting identity");
  const Split samples{opt.scaled(10000), 50};
  const int depths = opt.identity_depth + 1;
  const auto worst = parallel_map(samples.chunks, opt.workers, [&](std::uint64_t c) {
    Rng rng = chunk_stream(opt, "identities/xprime", c);
    double w = 0.0;
    for (std::uint64_t i = 0; i < samples.size(c); ++i) {
      const int k = static_cast<int>((c + i) % static_cast<std::uint64_t>(depths));
      w = std::max(w, sample_brw(k, rng).m.identity_residual());
    }
    return w;
  });
  c = at_most("X'_k = (X_k - gbar_k Xtilde_k) e^{c* gbar_k}, max relative residual",
              *std::max_element(worst.begin(), worst.end()), opt.thresholds.identity_relative);
  c.extra["samples"] = samples.total;
  c.extra["max_depth"] = opt.identity_depth;
  out.checks.push_back(c);
  return out;
}

SuiteResult check_moments(const CheckOptions& opt) {
  SuiteResult out;
  const int J = opt.moment_depth;
  const int oracle_depth = std::min(J, 8);
  // Per-excursion averages over the 2^j vertices of level j; the averages are
  // i.i.d. across excursions, so their sample standard error is exact.
  struct Level {
    RunningStats reach, exactly_one, mean, sq_dev, r, r_sq_dev;
  };
  std::vector<double> r_exact(J + 1);
  for (int j = 0; j <= J; ++j) r_exact[j] = 2.0 - std::ldexp(1.0, -j);
  const Split ex{opt.scaled(opt.excursions), 100};
  progress(opt, "moments: " + std::to_string(ex.total) + " single excursions on T_" + std::to_string(J));
  const auto parts = parallel_map(ex.chunks, opt.workers, [&](std::uint64_t c) {
    Rng rng = chunk_stream(opt, "moments", c);
    std::vector<Level> lv(J + 1);
    std::vector<double> reach(J + 1), one(J + 1), sum(J + 1), sq(J + 1), present(J + 1);
    for (std::uint64_t i = 0; i < ex.size(c); ++i) {
      const CountTree t = sample_single_excursion(J, rng);
      std::fill(reach.begin(), reach.end(), 0.0);
      std::fill(one.begin(), one.end(), 0.0);
      std::fill(sum.begin(), sum.end(), 0.0);
      std::fill(sq.begin(), sq.end(), 0.0);
      std::fill(present.begin(), present.end(), 0.0);
      for (const auto& e : t.edges()) {
        const int j = heap_level(e.id);
        const double v = static_cast<double>(e.count);
        reach[j] += 1.0;
        one[j] += e.count == 1;
        sum[j] += v;
        sq[j] += (v - 1.0) * (v - 1.0);
      }
      double levels = 0.0;
      for (int j = 0; j <= J; ++j) {
        const double width = std::ldexp(1.0, j);
        levels += sum[j];
        const double r = levels / width;  // R_j^1
        lv[j].reach.add(reach[j] / width);
        lv[j].exactly_one.add(one[j] / width);
        lv[j].mean.add(sum[j] / width);
        // Absent edges have count 0, deviation (0 - 1)^2 = 1.
        lv[j].sq_dev.add((sq[j] + (width - reach[j])) / width);
        lv[j].r.add(r);
        lv[j].r_sq_dev.add((r - r_exact[j]) * (r - r_exact[j]));
      }
    }
    return lv;
  });
  std::vector<Level> lv(J + 1);
  for (const auto& p : parts)
    for (int j = 0; j <= J; ++j) {
      lv[j].reach.merge(p[j].reach);
      lv[j].exactly_one.merge(p[j].exactly_one);
      lv[j].mean.merge(p[j].mean);
      lv[j].sq_dev.merge(p[j].sq_dev);
      lv[j].r.merge(p[j].r);
      lv[j].r_sq_dev.merge(p[j].r_sq_dev);
    }
  const double k = opt.thresholds.sigma_probability;
  for (int j = 1; j <= J; ++j) {
    const std::string tag = " (j=" + std::to_string(j) + ")";
    const double p = 1.0 / (j + 1);
    out.checks.push_back(sigma_check("P(T_j >= 1) = 1/(j+1)" + tag, lv[j].reach, p, k));
    out.checks.push_back(sigma_check("P(T_j = 1) = p_j^2, geometric given T_j >= 1" + tag, lv[j].exactly_one, p * p, k));
    out.checks.push_back(sigma_check("E[T_j] = 1" + tag, lv[j].mean, 1.0, k));
    auto v = relative_check("Var(T_j) = 2j" + tag, lv[j].sq_dev.mean(), 2.0 * j, opt.thresholds.variance_relative);
    v.extra["std_error"] = lv[j].sq_dev.std_error();
    out.checks.push_back(v);
    out.checks.push_back(sigma_check("E[R_j^1] = 2 - 2^{-j}" + tag, lv[j].r, r_exact[j], k));
  }
  progress(opt, "moments: Var(R_j^1) against the exact oracle");
  for (int j = 1; j <= oracle_depth; ++j) {
    const oracle::SingleExcursionMoments m(j);
    auto c = sigma_check("Var(R_j^1) = exact oracle (j=" + std::to_string(j) + ")", lv[j].r_sq_dev,
                         m.variance_r(), k);
    c.extra["bound_4_holds"] = m.variance_r() <= 4.0;
    out.checks.push_back(c);
  }

  // The walk itself, on fewer excursions: same reach probabilities.
  const Split walk{opt.scaled(20000), 20};
  progress(opt, "moments: " + std::to_string(walk.total) + " walk excursions on T_" + std::to_string(J));
  const auto walk_parts = parallel_map(walk.chunks, opt.workers, [&](std::uint64_t c) {
    Rng rng = chunk_stream(opt, "moments/walk", c);
    std::vector<RunningStats> reach(J + 1);
    for (std::uint64_t i = 0; i < walk.size(c); ++i) {
      const auto run = run_excursions(J, 1, rng);
      std::vector<double> hit(J + 1, 0.0);
      for (const auto& e : run.counts.edges()) hit[heap_level(e.id)] += 1.0;
      for (int j = 0; j <= J; ++j) reach[j].add(hit[j] / std::ldexp(1.0, j));
    }
    return reach;
  });
  for (int j : {J / 3, 2 * J / 3, J}) {
    if (j < 1) continue;
    RunningStats s;
    for (const auto& p : walk_parts) s.merge(p[j]);
    out.checks.push_back(sigma_check("walk: P(T_j >= 1) = 1/(j+1) (j=" + std::to_string(j) + ")", s, 1.0 / (j + 1), k));
  }
  return out;
}

namespace {

/// Leaf counts of T_4 capped at 3, packed in base 4.
std::uint64_t leaf_key(const CountTree& t) {
  std::uint64_t key = 0;
  for (auto c : t.level_counts(4)) key = key * 4 + std::min<std::uint64_t>(c, 3);
  return key;
}

CheckResult chi_check(std::string name, std::span<const std::uint64_t> a, std::span<const std::uint64_t> b,
                      double p_min) {
  const auto r = chi_square_two_sample(tabulate(a, b));
  CheckResult c = at_least(std::move(name), r.p_value, p_min);
  c.rule = "chi-square p-value >= expected";
  c.extra["statistic"] = r.statistic;
  c.extra["dof"] = r.dof;
  c.extra["categories"] = r.categories;
  c.extra["samples_each"] = a.size();
  return c;
}

}  // namespace

SuiteResult check_chain_equivalence(const CheckOptions& opt) {
  SuiteResult out;
  const double p_min = opt.thresholds.chi_square_p;
  const Split n{opt.scaled(100000), 50};
  progress(opt, "chain-equivalence: T_4 leaf vectors, walk vs branching process");
  using Keys = std::pair<std::vector<std::uint64_t>, std::vector<std::uint64_t>>;
  auto gather = [&](auto&& body, std::string_view tag) {
    const auto parts = parallel_map(n.chunks, opt.workers, [&](std::uint64_t c) {
      Rng rng = chunk_stream(opt, tag, c);
      Keys k;
      for (std::uint64_t i = 0; i < n.size(c); ++i) body(rng, k);
      return k;
    });
    Keys all;
    for (const auto& p : parts) {
      all.first.insert(all.first.end(), p.first.begin(), p.first.end());
      all.second.insert(all.second.end(), p.second.begin(), p.second.end());
    }
    return all;
  };
  const Keys walk = gather(
      [](Rng& rng, Keys& k) {
        const auto t = run_excursions(4, 1, rng).counts;
        k.first.push_back(leaf_key(t));
        k.second.push_back(t.level_total(4));
      },
      "chain/walk");
  const Keys gw = gather(
      [](Rng& rng, Keys& k) {
        const auto t = sample_single_excursion(4, rng);
        k.first.push_back(leaf_key(t));
        k.second.push_back(t.level_total(4));
      },
      "chain/gw");
  out.checks.push_back(chi_check("T_4 joint leaf counts (capped at 3): walk vs branching process", walk.first, gw.first, p_min));
  out.checks.push_back(chi_check("T_4 total leaf count: walk vs branching process", walk.second, gw.second, p_min));

  for (std::uint64_t t : {1, 5, 20}) {
    progress(opt, "chain-equivalence: NB(" + std::to_string(t) + ", 1/2) step");
    const Keys k = gather(
        [t](Rng& rng, Keys& k) {
          k.first.push_back(chain_step(chain_start(t), rng).count);
          k.second.push_back(offspring_sum_by_pairs(t, rng).a);
        },
        "chain/nb" + std::to_string(t));
    out.checks.push_back(chi_check("geodesic step from t=" + std::to_string(t) +
                                       ": Gamma-Poisson chain vs summed offspring pairs",
                                   k.first, k.second, p_min));
  }
  return out;
}

SuiteResult check_covariance_oracle(const CheckOptions& opt) {
  SuiteResult out;
  const oracle::SingleExcursionMoments m(3);
  const Split n{opt.scaled(1000000), 100};
  progress(opt, "covariance-oracle: " + std::to_string(n.total) + " walk excursions on T_3");
  // Products of leaf counts for leaf pairs (u <= u'); E[T_u] = 1 exactly.
  const auto parts = parallel_map(n.chunks, opt.workers, [&](std::uint64_t c) {
    Rng rng = chunk_stream(opt, "covariance", c);
    std::vector<RunningStats> prod(64);
    for (std::uint64_t i = 0; i < n.size(c); ++i) {
      const auto leaves = run_excursions(3, 1, rng).counts.level_counts(3);
      for (int u = 0; u < 8; ++u)
        for (int w = u; w < 8; ++w) prod[u * 8 + w].add(static_cast<double>(leaves[u] * leaves[w]));
    }
    return prod;
  });
  const double k = opt.thresholds.sigma_probability;
  for (int u = 0; u < 8; ++u)
    for (int w = u; w < 8; ++w) {
      RunningStats s;
      for (const auto& p : parts) s.merge(p[u * 8 + w]);
      const double exact = m.covariance(8 + u, 8 + w);
      const int depth = lca(VertexId{3, static_cast<std::uint64_t>(u)}, VertexId{3, static_cast<std::uint64_t>(w)}).level;
      auto c = sigma_check("Cov(T_u, T_u') leaves " + std::to_string(u) + "," + std::to_string(w), s.mean() - 1.0,
                           s.std_error(), exact, k);
      c.extra["oracle"] = exact;
      c.extra["two_depth"] = 2 * depth;
      c.extra["lca_depth"] = depth;
      out.checks.push_back(c);
    }
  return out;
}

}  // namespace covertree
