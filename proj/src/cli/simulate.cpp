#include "covertree/simulate.hpp"

#include <bit>
#include <memory>

#include "covertree/barrier_events.hpp"
#include "covertree/brw_martingale.hpp"
#include "covertree/alpha_ell.hpp"
#include "covertree/centering.hpp"
#include "covertree/errors.hpp"
#include "covertree/excursion_gw.hpp"
#include "covertree/parallel.hpp"
#include "covertree/srw_engine.hpp"

namespace covertree {

namespace {

std::string num(double x) { return format_number(x); }
std::string num(std::uint64_t x) { return format_number(x); }

SampleRow base_row(const RunConfig& cfg, SampleKind kind, std::uint64_t replica) {
  SampleRow r;
  r.kind = kind;
  r.n = cfg.n;
  r.replica = replica;
  r.seed = cfg.seed;
  if (kind == SampleKind::event) {
    r.ell = cfg.ell;
    r.z = cfg.z;
  }
  if (kind == SampleKind::gamma_tilde) {
    r.n = cfg.ell;
    r.ell = cfg.ell;
    r.z = cfg.y_min + cfg.y_step * static_cast<double>(replica);
  }
  return r;
}

void cover_row(const RunConfig& cfg, SampleRow& row, Rng& rng) {
  const CoverSample s = run_to_cover(cfg.n, rng, false, cfg.caps.steps).sample;
  row.values = {num(s.t_star), num(*s.cover_steps), num(*s.steps_at_s), "", ""};
  if (cfg.n >= 1) {
    const auto [yc, yt] = normalized_cover(s);
    row.values[3] = num(yc);
    row.values[4] = num(yt);
  }
}

void tstar_row(const RunConfig& cfg, SampleRow& row, Rng& rng) {
  // One sampler per thread; it only holds scratch space.
  thread_local std::unique_ptr<TStarSampler> sampler;
  if (!sampler || sampler->depth() != cfg.n) sampler = std::make_unique<TStarSampler>(cfg.n);
  const CoverSample s = sampler->sample(rng, cfg.caps.excursions);
  row.values = {num(s.t_star), cfg.n >= 1 ? num(normalized_cover(s).second) : ""};
}

void brw_row(const RunConfig& cfg, SampleRow& row, Rng& rng) {
  const Martingales m = sample_brw(cfg.n, rng).m;
  row.values = {num(m.x_prime), num(m.gbar), num(m.x), num(m.x_tilde)};
}

void event_row(const BarrierGeometry& g, SampleRow& row, Rng& rng) {
  const BarrierCounts b = sample_barrier_counts(g, rng);
  row.values = {num(b.lambda), num(b.gamma), b.g_event ? "1" : "0", b.uncovered ? "1" : "0"};
}

void gamma_row(const RunConfig& cfg, SampleRow& row, Rng& rng) {
  const auto est = gamma_tilde_mc(cfg.ell, row.z, cfg.inner_replicas, rng);
  row.values = {num(row.z), num(est.p), num(est.std_error()), num(est.trials)};
}

}  // namespace

Rng replica_stream(const RunConfig& cfg, SampleKind kind, std::uint64_t replica) {
  std::uint64_t extra = 0;
  if (kind == SampleKind::event) {
    extra = mix64(static_cast<std::uint64_t>(cfg.ell)) ^ std::bit_cast<std::uint64_t>(cfg.z);
    if (cfg.s) extra = mix64(extra ^ *cfg.s);
  } else if (kind == SampleKind::gamma_tilde) {
    extra = std::bit_cast<std::uint64_t>(cfg.y_min + cfg.y_step * static_cast<double>(replica));
  }
  const int n = kind == SampleKind::gamma_tilde ? cfg.ell : cfg.n;
  return make_stream(cfg.seed, stream_id(kind_name(kind), static_cast<std::uint64_t>(n), replica, extra));
}

SampleFile simulate_rows(const RunConfig& cfg) {
  cfg.validate();
  const SampleKind kind = parse_kind(cfg.kind);
  // Fail before spawning work when the depth is out of reach.
  switch (kind) {
    case SampleKind::cover:
      if (cfg.n > kMaxSteppingDepth) throw ResourceError("cover: n exceeds the direct-stepping limit");
      break;
    case SampleKind::tstar:
      if (cfg.n > kMaxMaterializedDepth) throw ResourceError("tstar: n exceeds the materialized-tree limit");
      break;
    case SampleKind::brw_xprime:
      if (cfg.n > kMaxBrwDepth) throw ResourceError("brw_xprime: k exceeds the memory budget");
      break;
    default:
      break;
  }
  std::optional<BarrierGeometry> geometry;
  if (kind == SampleKind::event) {
    geometry = barrier_geometry({cfg.n, cfg.ell, cfg.z, cfg.delta});
    if (cfg.s) geometry->s = *cfg.s;
  }
  if (kind == SampleKind::gamma_tilde && cfg.ell < 2) throw DomainError("gamma_tilde: need ell >= 2");

  SampleFile file;
  file.kind = kind;
  file.rows = parallel_map(cfg.replicas, cfg.workers, [&](std::uint64_t i) {
    const std::uint64_t replica = cfg.replica_start + i;
    SampleRow row = base_row(cfg, kind, replica);
    Rng rng = replica_stream(cfg, kind, replica);
    try {
      switch (kind) {
        case SampleKind::cover: cover_row(cfg, row, rng); break;
        case SampleKind::tstar: tstar_row(cfg, row, rng); break;
        case SampleKind::brw_xprime: brw_row(cfg, row, rng); break;
        case SampleKind::event: event_row(*geometry, row, rng); break;
        case SampleKind::gamma_tilde: gamma_row(cfg, row, rng); break;
      }
    } catch (const CapExceededError&) {
      row.status = "cap_exceeded";
      row.values.assign(value_columns(kind).size(), "");
    }
    return row;
  });
  return file;
}

std::filesystem::path cmd_simulate(const RunConfig& cfg) {
  const SampleFile rows = simulate_rows(cfg);
  const auto path = output_path(cfg);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  append_samples(path, rows);
  return path;
}

}  // namespace covertree
