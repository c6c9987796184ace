#include "covertree/srw_engine.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "covertree/centering.hpp"
#include "covertree/errors.hpp"

namespace covertree {

namespace {

void check_depth(int n) {
  if (n < 0) throw DomainError("random walk: n must be >= 0");
  if (n > kMaxSteppingDepth) {
    throw ResourceError("random walk: depth " + std::to_string(n) + " exceeds the stepping limit " +
                        std::to_string(kMaxSteppingDepth));
  }
}

/// Uniform draws from {0, 1, 2}, two per 64-bit word (Lemire's multiply;
/// 2^32 mod 3 = 1, so only a zero low word is rejected).
class Ternary {
 public:
  unsigned operator()(Rng& rng) {
    for (;;) {
      if (left_ == 0) {
        buf_ = rng();
        left_ = 2;
      }
      const std::uint64_t m = (buf_ & 0xFFFFFFFFu) * 3u;
      buf_ >>= 32;
      --left_;
      if ((m & 0xFFFFFFFFu) != 0) return static_cast<unsigned>(m >> 32);
    }
  }

 private:
  std::uint64_t buf_ = 0;
  int left_ = 0;
};

/// One walk step from pos; returns the new position and whether it was a
/// down-crossing.
inline std::uint64_t step(std::uint64_t pos, std::uint64_t first_leaf, Ternary& tern, Rng& rng,
                          bool& down) {
  if (pos == 0) {
    down = true;
    return 1;
  }
  if (pos >= first_leaf) {
    down = false;
    return pos >> 1;
  }
  const unsigned c = tern(rng);
  if (c == 0) {
    down = false;
    return pos >> 1;
  }
  down = true;
  return 2 * pos + (c - 1);
}

}  // namespace

std::uint64_t default_step_cap(int n) {
  check_depth(n);
  const double m = n == 0 ? 0.0 : centering(n).m;
  return static_cast<std::uint64_t>(std::ldexp((m + 50.0) * (m + 50.0), n + 1));
}

ExcursionRun run_excursions(int n, std::uint64_t s, Rng& rng, std::uint64_t step_cap) {
  check_depth(n);
  if (s < 1) throw DomainError("run_excursions: s must be >= 1");
  if (step_cap == 0) {
    const double a = std::sqrt(2.0 * static_cast<double>(s)) + 50.0;
    step_cap = static_cast<std::uint64_t>(std::ldexp(a * a, n + 1));
  }
  const std::uint64_t first_leaf = std::uint64_t{1} << n;
  std::vector<std::uint64_t> counts(2 * first_leaf, 0);
  Ternary tern;
  std::uint64_t pos = 0;
  std::uint64_t steps = 0;
  for (std::uint64_t e = 0; e < s; ++e) {
    do {
      if (steps == step_cap) throw CapExceededError("run_excursions: step cap exceeded");
      bool down;
      pos = step(pos, first_leaf, tern, rng, down);
      ++steps;
      if (down) ++counts[pos];
    } while (pos != 0);
  }
  return {CountTree::from_dense(n, s, counts), steps};
}

CoverRun run_to_cover(int n, Rng& rng, bool record_counts, std::uint64_t step_cap) {
  check_depth(n);
  if (step_cap == 0) step_cap = default_step_cap(n);
  const std::uint64_t first_leaf = std::uint64_t{1} << n;
  std::vector<std::uint8_t> visited(2 * first_leaf, 0);
  visited[0] = 1;  // rho, visited at time 0
  std::vector<std::uint64_t> counts(record_counts ? 2 * first_leaf : 0, 0);
  std::uint64_t unvisited = 2 * first_leaf - 1;
  Ternary tern;
  std::uint64_t pos = 0;
  std::uint64_t steps = 0;
  std::uint64_t excursions = 0;
  CoverSample sample;
  sample.n = n;
  for (;;) {
    if (steps == step_cap) throw CapExceededError("run_to_cover: step cap exceeded");
    if (pos == 0) ++excursions;
    bool down;
    pos = step(pos, first_leaf, tern, rng, down);
    ++steps;
    if (record_counts && down) ++counts[pos];
    if (!visited[pos]) {
      visited[pos] = 1;
      if (--unvisited == 0) {
        sample.cover_steps = steps;
        sample.t_star = excursions;
      }
    }
    if (pos == 0 && unvisited == 0) break;
  }
  sample.steps_at_s = steps;
  CoverRun run{sample, std::nullopt};
  if (record_counts) run.counts = CountTree::from_dense(n, excursions, counts);
  return run;
}

}  // namespace covertree
