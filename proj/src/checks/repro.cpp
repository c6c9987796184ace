#include <sstream>
#include <vector>

#include "check_util.hpp"
#include "covertree/errors.hpp"
#include "covertree/simulate.hpp"

namespace covertree {

using namespace detail;

namespace {

std::string body(const SampleFile& f) {
  std::string s;
  for (const auto& r : f.rows) s += format_row(r) + '\n';
  return s;
}

std::vector<RunConfig> repro_configs(const CheckOptions& opt) {
  std::vector<RunConfig> out;
  auto add = [&](std::string kind, int n, std::uint64_t replicas) -> RunConfig& {
    RunConfig c;
    c.command = "simulate";
    c.kind = std::move(kind);
    c.n = n;
    c.replicas = replicas;
    c.seed = opt.seed;
    out.push_back(c);
    return out.back();
  };
  add("cover", 0, 50);
  add("cover", 6, 200);
  add("tstar", 10, 1000).seed = 7;
  add("brw_xprime", 8, 200);
  auto& ev = add("event", 10, 200);
  ev.ell = 3;
  ev.z = 1.5;
  auto& gt = add("gamma_tilde", 0, 8);
  gt.ell = 6;
  gt.inner_replicas = 2000;
  return out;
}

}  // namespace

SuiteResult check_reproducibility(const CheckOptions& opt) {
  SuiteResult out;
  for (auto cfg : repro_configs(opt)) {
    const std::string tag = cfg.kind + " n=" + std::to_string(cfg.n) + " replicas=" + std::to_string(cfg.replicas);
    progress(opt, "reproducibility: " + tag);
    cfg.workers = 1;
    const std::string ref = body(simulate_rows(cfg));
    std::uint64_t mismatches = ref == body(simulate_rows(cfg)) ? 0 : 1;
    for (unsigned w : {4u, 16u}) {
      cfg.workers = w;
      mismatches += ref == body(simulate_rows(cfg)) ? 0 : 1;
    }
    auto c = at_most("byte-identical rows across reruns and 1/4/16 workers: " + tag, static_cast<double>(mismatches), 0);
    c.extra["bytes"] = ref.size();
    out.checks.push_back(c);

    // Two halves of the replica range merge back to the full run.
    RunConfig lo = cfg, hi = cfg;
    lo.replicas = cfg.replicas / 2;
    hi.replica_start = lo.replicas;
    hi.replicas = cfg.replicas - lo.replicas;
    const std::vector<SampleFile> halves{simulate_rows(hi), simulate_rows(lo)};
    out.checks.push_back(at_most("split replica ranges merge to the full run: " + tag,
                                 body(merge_samples(halves)) == ref ? 0.0 : 1.0, 0));
    bool rejected = false;
    try {
      const std::vector<SampleFile> twice{halves[0], halves[0]};
      merge_samples(twice);
    } catch (const ConflictError&) {
      rejected = true;
    }
    out.checks.push_back(at_most("merging a file with itself is rejected: " + tag, rejected ? 0.0 : 1.0, 0));
  }

  RunConfig zero;
  zero.kind = "cover";
  zero.n = 0;
  zero.replicas = 50;
  zero.seed = opt.seed;
  std::uint64_t odd = 0;
  for (const auto& r : simulate_rows(zero).rows) odd += r.values[0] != "1" || r.values[1] != "1";
  out.checks.push_back(at_most("cover on T_0: every row has t_star = 1, C = 1", static_cast<double>(odd), 0));
  return out;
}

}  // namespace covertree
