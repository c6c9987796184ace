// covertree: simulate, verify, fit, report and merge cover-time experiments.
//
// Exit codes: 0 pass, 1 check failure, 2 usage or conflicting input,
// 3 resource limit or cap.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "covertree/alpha_ell.hpp"
#include "covertree/brw_martingale.hpp"
#include "covertree/centering.hpp"
#include "covertree/checks.hpp"
#include "covertree/distributions.hpp"
#include "covertree/errors.hpp"
#include "covertree/limit_law_stats.hpp"
#include "covertree/parallel.hpp"
#include "covertree/simulate.hpp"

using namespace covertree;
using nlohmann::json;

namespace {

enum Exit { kPass = 0, kFail = 1, kUsage = 2, kResource = 3 };

/// TOML config files through CLI11, plus flat or nested JSON objects.
class TomlOrJson : public CLI::ConfigBase {
 public:
  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    std::stringstream buf;
    buf << input.rdbuf();
    const std::string text = buf.str();
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first == std::string::npos || text[first] != '{') {
      std::istringstream again(text);
      return CLI::ConfigBase::from_config(again);
    }
    json j;
    try {
      j = json::parse(text);
    } catch (const json::exception& e) {
      throw CLI::ConfigError(std::string("bad JSON config: ") + e.what());
    }
    std::vector<CLI::ConfigItem> items;
    flatten(j, {}, items);
    return items;
  }

 private:
  static std::string scalar(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    return v.dump();
  }

  static void flatten(const json& j, std::vector<std::string> parents, std::vector<CLI::ConfigItem>& out) {
    for (const auto& [key, v] : j.items()) {
      if (v.is_object()) {
        auto p = parents;
        p.push_back(key);
        flatten(v, p, out);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = key;
      if (v.is_array()) {
        for (const auto& e : v) item.inputs.push_back(scalar(e));
      } else {
        item.inputs.push_back(scalar(v));
      }
      out.push_back(std::move(item));
    }
  }
};

json config_json(const RunConfig& c) {
  json j{{"command", c.command}, {"kind", c.kind},       {"n", c.n},
         {"ell", c.ell},         {"z", c.z},             {"replicas", c.replicas},
         {"replica_start", c.replica_start},             {"seed", c.seed},
         {"workers", c.workers}, {"delta", c.delta},     {"inputs", c.inputs}};
  if (c.s) j["s"] = *c.s;
  const auto& t = c.thresholds;
  j["thresholds"] = {{"ks_stability", t.ks_stability},   {"ks_mixture", t.ks_mixture},
                     {"ks_shift", t.ks_shift},           {"tail_c", {t.tail_c_lo, t.tail_c_hi}},
                     {"sigma_probability", t.sigma_probability},
                     {"sigma_closed_form", t.sigma_closed_form},
                     {"variance_relative", t.variance_relative},
                     {"chi_square_p", t.chi_square_p}};
  return j;
}

json number(double x) { return std::isfinite(x) ? json(x) : json(); }

json report(const std::string& test, double statistic, double p_value, const RunConfig& cfg,
            const std::set<std::uint64_t>& seeds, bool pass) {
  return json{{"test", test},        {"statistic", number(statistic)}, {"p_value", number(p_value)},
              {"config", config_json(cfg)}, {"seeds", seeds},         {"pass", pass}};
}

void emit(const json& j, const std::string& path) {
  const std::string text = j.dump(2) + "\n";
  std::cout << text;
  if (!path.empty()) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path);
    out << text;
  }
}

std::vector<SampleFile> read_inputs(const RunConfig& cfg, std::size_t at_least) {
  if (cfg.inputs.size() < at_least) {
    throw DomainError("need at least " + std::to_string(at_least) + " --in file(s)");
  }
  std::vector<SampleFile> files;
  for (const auto& p : cfg.inputs) files.push_back(read_samples(p));
  return files;
}

std::set<std::uint64_t> seeds_of(std::span<const SampleFile> files) {
  std::set<std::uint64_t> s;
  for (const auto& f : files)
    for (const auto& r : f.rows) s.insert(r.seed);
  return s;
}

int row_depth(const SampleFile& f) {
  if (f.rows.empty()) throw DataError("sample file has no rows");
  const int n = f.rows.front().n;
  for (const auto& r : f.rows) {
    if (r.n != n) throw DataError("sample file mixes several n");
  }
  return n;
}

/// Normalized values of a cover or tstar file: y_tstar for t*, y_cover for cover.
EmpiricalDistribution normalized(const SampleFile& f) {
  const int n = row_depth(f);
  std::string col;
  if (f.kind == SampleKind::tstar) col = "y_tstar";
  else if (f.kind == SampleKind::cover) col = "y_cover";
  else throw DataError("expected a cover or tstar file, got " + std::string(kind_name(f.kind)));
  const auto values = column(f, col);
  Provenance p{n, std::string(kind_name(f.kind)), f.rows.front().seed, f.rows.front().replica,
               f.rows.back().replica + 1};
  return EmpiricalDistribution(values, p);
}

// ---- simulate ----

int cmd_simulate_main(const RunConfig& cfg) {
  const auto path = cmd_simulate(cfg);
  std::cerr << "wrote " << cfg.replicas << " " << cfg.kind << " rows to " << path.string() << "\n";
  return kPass;
}

// ---- verify ----

int cmd_verify_main(const RunConfig& cfg, const std::vector<std::string>& suites, const CheckOptions& base) {
  std::vector<std::string> names = suites;
  if (names.empty() || (names.size() == 1 && names[0] == "all")) names = suite_names();
  json out{{"test", "verify"}, {"config", config_json(cfg)}, {"seeds", {base.seed}}, {"suites", json::array()}};
  bool pass = true;
  for (const auto& name : names) {
    const SuiteResult r = run_suite(name, base);
    pass = pass && r.pass();
    out["suites"].push_back(r.to_json());
    for (const auto& c : r.checks) {
      if (!c.pass && !c.informational) {
        std::cerr << "FAIL " << name << ": " << c.name << " observed " << c.observed << " expected "
                  << c.expected << " tolerance " << c.tolerance << " (" << c.rule << ")\n";
      }
    }
  }
  out["statistic"] = nullptr;
  out["p_value"] = nullptr;
  out["pass"] = pass;
  emit(out, cfg.out);
  return pass ? kPass : kFail;
}

// ---- fit ----

int fit_tail(const RunConfig& cfg) {
  const auto files = read_inputs(cfg, 1);
  const auto d = normalized(files[0]);
  const TailFit fit = tail_fit(d, cfg.z_lo, cfg.z_hi);
  const bool pass = fit.c >= cfg.thresholds.tail_c_lo && fit.c <= cfg.thresholds.tail_c_hi;
  json j = report("tail_fit", fit.c, NAN, cfg, seeds_of(files), pass);
  j["c_se"] = fit.c_se;
  j["alpha"] = fit.alpha;
  j["alpha_se"] = fit.alpha_se;
  j["c_star"] = kCStar;
  j["window"] = {cfg.z_lo, cfg.z_hi};
  j["grid"] = {{"z", fit.z}, {"survival", fit.survival}};
  emit(j, cfg.out);
  return pass ? kPass : kFail;
}

int fit_mixture(const RunConfig& cfg) {
  const auto files = read_inputs(cfg, 2);
  const SampleFile* data = nullptr;
  const SampleFile* brw = nullptr;
  for (const auto& f : files) {
    if (f.kind == SampleKind::brw_xprime) brw = &f;
    else data = &f;
  }
  if (!data || !brw) throw DomainError("fit mixture needs one cover/tstar file and one brw_xprime file");
  const auto d = normalized(*data);
  std::vector<double> x = column(*brw, "x_prime");
  // t* data mixes over X' e^{-c* G}, G ~ N(0, 1) independent.
  const bool tilt = data->kind == SampleKind::tstar;
  if (tilt) {
    Rng rng = make_stream(cfg.seed, stream_id("fit/tilt"));
    for (auto& v : x) v *= std::exp(-kCStar * standard_normal(rng));
  }
  const MixtureFit fit = mixture_cdf_fit(d, x);
  const bool pass = fit.ks <= cfg.thresholds.ks_mixture;
  json j = report("mixture_fit", fit.ks, NAN, cfg, seeds_of(files), pass);
  j["alpha"] = fit.alpha;
  j["excluded_fraction"] = fit.excluded_fraction;
  j["tilted"] = tilt;
  j["n"] = d.provenance().n;
  const std::string csv = cfg.out.empty() ? std::string() : cfg.out + ".csv";
  emit(j, cfg.out);
  if (!csv.empty()) {
    const MixtureCdf m(fit.alpha, kCStar, x);
    std::ofstream out(csv);
    out << "y,ecdf,mixture_cdf\n";
    const double lo = d.quantile(0.0), hi = d.quantile(1.0);
    for (int i = 0; i <= 200; ++i) {
      const double y = lo + (hi - lo) * i / 200.0;
      out << format_number(y) << ',' << format_number(d.cdf(y)) << ',' << format_number(m(y)) << '\n';
    }
    std::cerr << "wrote " << csv << "\n";
  }
  return pass ? kPass : kFail;
}

int fit_alpha(const RunConfig& cfg) {
  const auto files = read_inputs(cfg, 1);
  const SampleFile& f = files[0];
  AlphaEstimate a;
  if (f.kind == SampleKind::tstar) {
    const int ell = row_depth(f);
    std::vector<std::uint64_t> t;
    for (const auto& r : f.rows) {
      if (r.ok()) t.push_back(static_cast<std::uint64_t>(r.number("t_star")));
    }
    a = alpha_ell_from_tstar(ell, t);
  } else if (f.kind == SampleKind::gamma_tilde) {
    const int ell = row_depth(f);
    std::map<double, double> grid;
    for (const auto& r : f.rows) {
      if (r.ok()) grid[r.number("y")] = r.number("estimate");
    }
    if (grid.size() < 3) throw AccuracyError("fit alpha: need at least 3 gamma_tilde grid points");
    const double step = std::next(grid.begin())->first - grid.begin()->first;
    // Linear interpolation between grid points; zero outside the grid.
    auto fn = [&](double y) {
      const auto hi = grid.lower_bound(y);
      if (hi == grid.end()) return 0.0;
      if (hi == grid.begin()) return y == hi->first ? hi->second : 0.0;
      const auto lo = std::prev(hi);
      const double w = (y - lo->first) / (hi->first - lo->first);
      return lo->second + w * (hi->second - lo->second);
    };
    a = alpha_ell(ell, fn, AlphaGrid{grid.begin()->first, grid.rbegin()->first, step});
  } else {
    throw DataError("fit alpha needs a tstar or gamma_tilde file");
  }
  const bool pass = a.alpha > 0.0 && a.outside_support < 0.01;
  json j = report("alpha_ell", a.alpha, NAN, cfg, seeds_of(files), pass);
  j["ell"] = a.ell;
  j["std_error"] = a.std_error;
  j["quadrature_error"] = a.quadrature_error;
  j["tail_bound"] = a.tail_bound;
  j["outside_support"] = a.outside_support;
  emit(j, cfg.out);
  return pass ? kPass : kFail;
}

// ---- report ----

int report_stability(const RunConfig& cfg) {
  auto files = read_inputs(cfg, 2);
  std::vector<EmpiricalDistribution> d;
  for (const auto& f : files) d.push_back(normalized(f));
  std::sort(d.begin(), d.end(), [](const auto& a, const auto& b) { return a.provenance().n < b.provenance().n; });
  json table = json::array();
  bool pass = true;
  double worst = 0.0;
  std::vector<double> ks;
  for (std::size_t i = 0; i + 1 < d.size(); ++i) {
    const auto r = ks_two_sample(d[i], d[i + 1]);
    ks.push_back(r.statistic);
    worst = std::max(worst, r.statistic);
    pass = pass && r.statistic <= cfg.thresholds.ks_stability;
    table.push_back({{"n_lo", d[i].provenance().n}, {"n_hi", d[i + 1].provenance().n},
                     {"ks", r.statistic},          {"p_value", r.p_value},
                     {"mean_lo", d[i].mean()},      {"mean_hi", d[i + 1].mean()}});
  }
  bool monotone = true;
  for (std::size_t i = 0; i + 1 < ks.size(); ++i) {
    const double noise = 1.36 * std::sqrt(2.0 / static_cast<double>(d[i + 1].size()));
    monotone = monotone && ks[i + 1] <= ks[i] + noise;
  }
  json j = report("stability", worst, NAN, cfg, seeds_of(files), pass);
  j["table"] = table;
  j["monotone_or_flat"] = monotone;
  emit(j, cfg.out);
  return pass ? kPass : kFail;
}

int report_shift(const RunConfig& cfg) {
  const auto files = read_inputs(cfg, 2);
  const SampleFile* cover = nullptr;
  const SampleFile* tstar = nullptr;
  for (const auto& f : files) {
    if (f.kind == SampleKind::cover) cover = &f;
    if (f.kind == SampleKind::tstar) tstar = &f;
  }
  if (!cover || !tstar) throw DomainError("report shift needs one cover file and one tstar file");
  Rng rng = make_stream(cfg.seed, stream_id("report/shift"));
  const auto r = shift_test(normalized(*cover), normalized(*tstar), rng);
  const bool control_ok = r.control.p_value <= 0.01 && r.control.statistic > r.shifted.statistic;
  const bool pass = r.shifted.statistic <= cfg.thresholds.ks_shift && control_ok;
  json j = report("shift", r.shifted.statistic, r.shifted.p_value, cfg, seeds_of(files), pass);
  j["control"] = {{"sd", r.control_sd}, {"statistic", r.control.statistic}, {"p_value", r.control.p_value},
                  {"rejected", control_ok}};
  emit(j, cfg.out);
  return pass ? kPass : kFail;
}

int report_ecdf(const RunConfig& cfg) {
  const auto files = read_inputs(cfg, 1);
  const auto d = normalized(files[0]);
  std::ostringstream csv;
  csv << "y,ecdf\n";
  const auto v = d.values();
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i + 1 < v.size() && v[i + 1] == v[i]) continue;
    csv << format_number(v[i]) << ',' << format_number(static_cast<double>(i + 1) / static_cast<double>(v.size()))
        << '\n';
  }
  if (cfg.out.empty()) {
    std::cout << csv.str();
  } else {
    std::ofstream(cfg.out) << csv.str();
  }
  return kPass;
}

int report_events(const RunConfig& cfg) {
  const auto files = read_inputs(cfg, 1);
  struct Acc {
    RunningStats unc, lam, lam2, diff, g;
    std::uint64_t violations = 0;
  };
  std::map<std::tuple<int, int, double>, Acc> groups;
  for (const auto& f : files) {
    if (f.kind != SampleKind::event) throw DataError("report events needs event files");
    for (const auto& r : f.rows) {
      if (!r.ok()) continue;
      auto& a = groups[{r.n, r.ell, r.z}];
      const double l = r.number("lambda");
      const bool u = r.number("uncovered") != 0.0;
      a.violations += l >= 1 && !u;
      a.unc.add(u);
      a.lam.add(l);
      a.lam2.add(l * (l - 1));
      a.diff.add((u ? 1.0 : 0.0) - l + l * (l - 1));
      a.g.add(r.number("g_event"));
    }
  }
  bool pass = true;
  json rows = json::array();
  const double k = cfg.thresholds.sigma_closed_form;
  for (const auto& [key, a] : groups) {
    const bool sandwich = a.diff.mean() + k * a.diff.std_error() >= 0.0;
    pass = pass && sandwich && a.violations == 0;
    rows.push_back({{"n", std::get<0>(key)},
                    {"ell", std::get<1>(key)},
                    {"z", std::get<2>(key)},
                    {"replicas", a.unc.count()},
                    {"p_uncovered", a.unc.mean()},
                    {"E_lambda", a.lam.mean()},
                    {"E_lambda_se", a.lam.std_error()},
                    {"E_lambda_lambda_minus_1", a.lam2.mean()},
                    {"sandwich_margin", a.diff.mean()},
                    {"sandwich_margin_se", a.diff.std_error()},
                    {"sandwich_holds", sandwich},
                    {"p_g_event", a.g.mean()},
                    {"implication_violations", a.violations}});
  }
  json j = report("events", NAN, NAN, cfg, seeds_of(files), pass);
  j["table"] = rows;
  emit(j, cfg.out);
  return pass ? kPass : kFail;
}

// ---- merge ----

int cmd_merge_main(const RunConfig& cfg) {
  const auto files = read_inputs(cfg, 1);
  if (cfg.out.empty()) throw DomainError("merge needs --out");
  if (std::filesystem::exists(cfg.out)) throw ConflictError(cfg.out + " already exists");
  const SampleFile merged = merge_samples(files);
  write_samples(cfg.out, merged);
  std::cerr << "wrote " << merged.rows.size() << " rows to " << cfg.out << "\n";
  return kPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random-walk cover times on binary trees: simulation, checks and limit-law fits"};
  app.require_subcommand(1);
  app.config_formatter(std::make_shared<TomlOrJson>());
  app.set_config("--config", "", "TOML or JSON file with option values");

  RunConfig cfg;
  CheckOptions chk;
  std::string j_range;
  std::uint64_t s_value = 0;
  app.add_option("--n", cfg.n, "tree depth n (k for brw_xprime)");
  app.add_option("--ell", cfg.ell, "subtree depth ell");
  app.add_option("--z", cfg.z, "level offset z, s = floor((m_n + z)^2 / 2)");
  auto* s_opt = app.add_option("--s", s_value, "excursion count, overrides the z-derived s for event runs");
  app.add_option("--replicas", cfg.replicas, "number of replicas");
  app.add_option("--replica-start", cfg.replica_start, "first replica index");
  app.add_option("--seed", cfg.seed, "master seed");
  app.add_option("--workers", cfg.workers, "worker threads")->default_val(default_workers());
  app.add_option("--out", cfg.out, "output path (simulate default: $COVERTREE_DATA_DIR/<kind>_n<n>_seed<seed>.csv)");
  app.add_option("--in", cfg.inputs, "input sample files");
  app.add_option("--delta", cfg.delta, "barrier exponent delta in (0, 1/6)");
  app.add_option("--step-cap", cfg.caps.steps, "walk step cap (0: engine default)");
  app.add_option("--excursion-cap", cfg.caps.excursions, "excursion cap for t* sampling");
  app.add_option("--y-min", cfg.y_min, "gamma_tilde grid start");
  app.add_option("--y-step", cfg.y_step, "gamma_tilde grid step");
  app.add_option("--inner-replicas", cfg.inner_replicas, "direct draws per gamma_tilde grid point");
  app.add_option("--z-lo", cfg.z_lo, "tail fit window start");
  app.add_option("--z-hi", cfg.z_hi, "tail fit window end");
  app.add_option("--scale", cfg.scale, "multiplier for verify sample sizes");
  app.add_option("--excursions", chk.excursions, "single excursions for verify moments");
  app.add_option("--j", j_range, "levels for verify moments, e.g. 1..12");
  app.add_option("--k", chk.identity_depth, "deepest k for verify identities");
  auto& th = cfg.thresholds;
  app.add_option("--ks-stability", th.ks_stability, "cross-n KS threshold");
  app.add_option("--ks-mixture", th.ks_mixture, "mixture fit KS threshold");
  app.add_option("--ks-shift", th.ks_shift, "shift test KS threshold");
  app.add_option("--tail-c-lo", th.tail_c_lo, "tail fit band, lower end");
  app.add_option("--tail-c-hi", th.tail_c_hi, "tail fit band, upper end");
  app.add_option("--sigma", th.sigma_probability, "sigma multiplier for probabilities and moments");
  app.add_option("--sigma-closed-form", th.sigma_closed_form, "sigma multiplier for closed-form checks");
  app.add_option("--variance-rel", th.variance_relative, "relative tolerance for variances");
  app.add_option("--chi-square-p", th.chi_square_p, "minimum chi-square p-value");

  std::string kind;
  std::vector<std::string> suites;
  auto* sim = app.add_subcommand("simulate", "write sample rows (cover, tstar, brw_xprime, event, gamma_tilde)");
  sim->add_option("kind", kind, "sample kind")->required();
  auto* ver = app.add_subcommand("verify", "run check suites and print a JSON report");
  ver->add_option("suite", suites, "suite names or 'all'");
  auto* fit = app.add_subcommand("fit", "tail, mixture or alpha fits");
  fit->add_option("kind", kind, "tail | mixture | alpha")->required();
  auto* rep = app.add_subcommand("report", "stability, shift, ecdf or events reports");
  rep->add_option("kind", kind, "stability | shift | ecdf | events")->required();
  auto* mrg = app.add_subcommand("merge", "merge sample files with disjoint replica ranges");
  for (auto* sub : {sim, ver, fit, rep, mrg}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kUsage;
  }

  try {
    if (*s_opt) cfg.s = s_value;
    cfg.kind = kind;
    cfg.validate();
    if (*sim) {
      cfg.command = "simulate";
      return cmd_simulate_main(cfg);
    }
    if (*ver) {
      cfg.command = "verify";
      chk.seed = cfg.seed;
      chk.workers = cfg.workers;
      chk.scale = cfg.scale;
      chk.thresholds = cfg.thresholds;
      if (!j_range.empty()) {
        const auto dots = j_range.find("..");
        const std::string hi = dots == std::string::npos ? j_range : j_range.substr(dots + 2);
        chk.moment_depth = std::stoi(hi);
        if (chk.moment_depth < 1 || chk.moment_depth > kMaxMaterializedDepth) throw DomainError("--j out of range");
      }
      if (chk.identity_depth < 0 || chk.identity_depth > kMaxBrwDepth) throw DomainError("--k out of range");
      chk.progress = [](const std::string& m) { std::cerr << m << "\n"; };
      return cmd_verify_main(cfg, suites, chk);
    }
    if (*fit) {
      cfg.command = "fit";
      if (kind == "tail") return fit_tail(cfg);
      if (kind == "mixture") return fit_mixture(cfg);
      if (kind == "alpha") return fit_alpha(cfg);
      throw DomainError("unknown fit '" + kind + "'");
    }
    if (*rep) {
      cfg.command = "report";
      if (kind == "stability") return report_stability(cfg);
      if (kind == "shift") return report_shift(cfg);
      if (kind == "ecdf") return report_ecdf(cfg);
      if (kind == "events") return report_events(cfg);
      throw DomainError("unknown report '" + kind + "'");
    }
    if (*mrg) {
      cfg.command = "merge";
      return cmd_merge_main(cfg);
    }
  } catch (const AccuracyError& e) {
    std::cerr << "accuracy error: " << e.what() << "\n";
    return kFail;
  } catch (const DomainError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const ConflictError& e) {
    std::cerr << "conflict: " << e.what() << "\n";
    return kUsage;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kUsage;
  } catch (const ResourceError& e) {
    std::cerr << "resource limit: " << e.what() << "\n";
    return kResource;
  } catch (const ArithmeticError& e) {
    std::cerr << "arithmetic limit: " << e.what() << "\n";
    return kResource;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
