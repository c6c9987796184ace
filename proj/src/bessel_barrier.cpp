#include "covertree/bessel_barrier.hpp"

#include <algorithm>
#include <cmath>

#include "covertree/distributions.hpp"
#include "covertree/errors.hpp"

namespace covertree {

double bridge_barrier_prob(double x, double w, const BarrierLine& line) {
  if (!(line.t2 > line.t1)) throw DomainError("bridge_barrier_prob: need t2 > t1");
  return step_survival(x, w, line.m1, line.m2, line.t2 - line.t1);
}

double step_survival(double w0, double w1, double phi0, double phi1, double dt) {
  const double a = std::max(w0 - phi0, 0.0);
  const double b = std::max(w1 - phi1, 0.0);
  return -std::expm1(-2.0 * a * b / dt);
}

ProportionEstimate bridge_barrier_mc(double x, double w, const BarrierLine& line, double dt,
                                     std::uint64_t paths, Rng& rng) {
  if (!(line.t2 > line.t1) || !(dt > 0.0)) throw DomainError("bridge_barrier_mc: bad grid");
  const double len = line.t2 - line.t1;
  const auto steps = std::max<std::int64_t>(1, std::llround(len / dt));
  const double h = len / static_cast<double>(steps);
  std::uint64_t alive = 0;
  for (std::uint64_t p = 0; p < paths; ++p) {
    double b = x;
    bool ok = true;
    for (std::int64_t i = 0; i < steps && ok; ++i) {
      const double t = line.t1 + h * static_cast<double>(i);
      const double remaining = line.t2 - t;
      double next;
      if (i + 1 == steps) {
        next = w;
      } else {
        const double mean = b + (w - b) * h / remaining;
        const double sd = std::sqrt(h * (remaining - h) / remaining);
        next = mean + sd * standard_normal(rng);
      }
      const double surv = step_survival(b, next, line.at(t), line.at(t + h), h);
      ok = uniform01(rng) < surv;
      b = next;
    }
    if (ok) ++alive;
  }
  return estimate_proportion(alive, paths);
}

double besq0_step(double z, double s, Rng& rng) {
  if (!(z >= 0.0) || !(s > 0.0)) throw DomainError("besq0_step: need z >= 0, s > 0");
  if (z == 0.0) return 0.0;
  const std::uint64_t n = poisson(rng, z / (2.0 * s));
  return n == 0 ? 0.0 : gamma(rng, static_cast<double>(n), 2.0 * s);
}

std::vector<double> sample_bessel0(double y0, int horizon, Rng& rng) {
  if (!(y0 >= 0.0) || horizon < 0) throw DomainError("sample_bessel0: need y0 >= 0, horizon >= 0");
  std::vector<double> path(static_cast<std::size_t>(horizon) + 1, 0.0);
  path[0] = y0;
  double z = y0 * y0;
  for (int t = 1; t <= horizon; ++t) {
    z = besq0_step(z, 1.0, rng);
    path[t] = std::sqrt(z);
  }
  return path;
}

ChainState chain_start(std::uint64_t s) { return {0, std::sqrt(2.0 * static_cast<double>(s)), s}; }

ChainState chain_step(const ChainState& state, Rng& rng) {
  ChainState next{state.j + 1, 0.0, 0};
  if (state.count == 0) return next;
  const double half_y2 = gamma(rng, static_cast<double>(state.count), 1.0);
  next.y = std::sqrt(2.0 * half_y2);
  next.count = poisson(rng, half_y2);
  return next;
}

double sample_U(double s, Rng& rng) {
  if (!(s > 0.0)) throw DomainError("sample_U: s must be positive");
  return std::sqrt(2.0 * gamma(rng, s, 1.0)) - std::sqrt(2.0 * s);
}

std::vector<double> poisson_pmf_range(double lambda, std::uint64_t lo, std::uint64_t hi) {
  if (!(lambda >= 0.0)) throw DomainError("poisson_pmf_range: negative mean");
  std::vector<double> out;
  if (hi < lo) return out;
  out.reserve(hi - lo + 1);
  for (std::uint64_t k = lo; k <= hi; ++k) {
    if (lambda == 0.0) {
      out.push_back(k == 0 ? 1.0 : 0.0);
      continue;
    }
    const double kd = static_cast<double>(k);
    out.push_back(std::exp(kd * std::log(lambda) - lambda - std::lgamma(kd + 1.0)));
  }
  return out;
}

double poisson_smooth(const std::function<double(double)>& g, double w) {
  const double lambda = 0.5 * w * w;
  // 40 standard deviations either side leaves mass far below double precision.
  const double spread = 40.0 * std::sqrt(lambda) + 40.0;
  const auto lo = static_cast<std::uint64_t>(std::max(0.0, std::floor(lambda - spread)));
  const auto hi = static_cast<std::uint64_t>(std::ceil(lambda + spread));
  const auto pmf = poisson_pmf_range(lambda, lo, hi);
  double acc = 0.0;
  for (std::uint64_t k = lo; k <= hi; ++k) {
    const double p = pmf[k - lo];
    if (p < 1e-300) continue;
    acc += p * g(std::sqrt(2.0 * static_cast<double>(k)));
  }
  return acc;
}

double GirsanovReport::z_score() const {
  const double se = std::hypot(bessel_side.std_error(), brownian_side.std_error());
  const double d = bessel_side.mean() - brownian_side.mean();
  return se > 0 ? d / se : (d == 0.0 ? 0.0 : INFINITY);
}

bool girsanov_z(const GirsanovSpec& spec, std::span<const double> skeleton) {
  for (std::size_t j = 0; j < spec.barrier.size() && j + 1 < skeleton.size(); ++j) {
    if (!(skeleton[j + 1] > spec.barrier[j])) return false;
  }
  return true;
}

GirsanovReport girsanov_check(const GirsanovSpec& spec, std::uint64_t bessel_replicas,
                              std::uint64_t brownian_replicas, Rng& rng) {
  if (!(spec.x > 0.0)) throw DomainError("girsanov_check: x must be positive");
  if (spec.horizon < 1) throw DomainError("girsanov_check: horizon must be >= 1");
  if (!spec.barrier.empty() && spec.barrier.size() != static_cast<std::size_t>(spec.horizon)) {
    throw DomainError("girsanov_check: barrier needs one value per integer time 1..horizon");
  }
  GirsanovReport r;
  r.spec = spec;
  for (std::uint64_t i = 0; i < bessel_replicas; ++i) {
    const auto path = sample_bessel0(spec.x, spec.horizon, rng);
    r.bessel_side.add(path.back() > 0.0 && girsanov_z(spec, path) ? 1.0 : 0.0);
  }
  const auto per_unit = std::max<std::int64_t>(1, std::llround(1.0 / spec.dt));
  const double h = 1.0 / static_cast<double>(per_unit);
  const double sh = std::sqrt(h);
  std::vector<double> skeleton(static_cast<std::size_t>(spec.horizon) + 1);
  std::vector<double> noise(static_cast<std::size_t>(per_unit));
  auto inv_sq = [&](double w) {
    const double v = std::max(w, spec.floor);
    return 1.0 / (v * v);
  };
  for (std::uint64_t i = 0; i < brownian_replicas; ++i) {
    double w = spec.x;
    double integral = 0.0;
    double survival = 1.0;
    bool alive = true;
    skeleton[0] = w;
    for (int t = 1; t <= spec.horizon && alive; ++t) {
      fill_standard_normal(rng, noise);
      for (std::int64_t k = 0; k < per_unit; ++k) {
        const double next = w + sh * noise[k];
        if (next <= 0.0) {
          alive = false;
          break;
        }
        integral += 0.5 * h * (inv_sq(w) + inv_sq(next));
        survival *= step_survival(w, next, 0.0, 0.0, h);
        w = next;
      }
      skeleton[t] = w;
      if (alive && !spec.barrier.empty() && !(w > spec.barrier[t - 1])) alive = false;
    }
    double weight = 0.0;
    if (alive) weight = survival * std::sqrt(spec.x / w) * std::exp(-0.375 * integral);
    r.brownian_side.add(weight);
  }
  return r;
}

}  // namespace covertree
