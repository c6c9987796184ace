#include "covertree/oracles.hpp"

#include <Eigen/Dense>
#include <bit>
#include <cmath>

#include "covertree/errors.hpp"

namespace covertree::oracle {

namespace {

/// Neighbours of heap id v in T_n with transition probabilities.
std::vector<std::pair<std::uint64_t, double>> moves(std::uint64_t v, int n) {
  if (v == 0) return {{1, 1.0}};
  const int level = std::bit_width(v) - 1;
  if (level == n) return {{v >> 1, 1.0}};
  return {{v >> 1, 1.0 / 3.0}, {2 * v, 1.0 / 3.0}, {2 * v + 1, 1.0 / 3.0}};
}

}  // namespace

SingleExcursionMoments::SingleExcursionMoments(int n) : n_(n) {
  if (n < 0 || n > 8) throw DomainError("SingleExcursionMoments: need 0 <= n <= 8");
  size_ = (std::size_t{2} << n) - 1;  // non-root vertices, heap ids 1..size
  const auto m = static_cast<Eigen::Index>(size_);
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(m, m);
  for (std::uint64_t v = 1; v <= size_; ++v) {
    for (auto [w, p] : moves(v, n)) {
      if (w != 0) a(static_cast<Eigen::Index>(v - 1), static_cast<Eigen::Index>(w - 1)) -= p;
    }
  }
  const Eigen::MatrixXd green = a.inverse();
  green_.resize(size_ * size_);
  for (std::size_t i = 0; i < size_; ++i) {
    for (std::size_t j = 0; j < size_; ++j) green_[i * size_ + j] = green(i, j);
  }
}

double SingleExcursionMoments::mean(std::uint64_t e) const {
  if (e == 0 || e > size_) throw DomainError("SingleExcursionMoments: bad edge");
  if (e == 1) return 1.0;
  return g(1, e >> 1) / 3.0;
}

double SingleExcursionMoments::second_moment(std::uint64_t e, std::uint64_t f) const {
  if (e == 1) return mean(f);
  if (f == 1) return mean(e);
  // Ordered pairs of crossing times: e before f, f before e, and the same crossing.
  double s = g(1, e >> 1) / 3.0 * g(e, f >> 1) / 3.0 + g(1, f >> 1) / 3.0 * g(f, e >> 1) / 3.0;
  if (e == f) s += mean(e);
  return s;
}

double SingleExcursionMoments::covariance(std::uint64_t e, std::uint64_t f) const {
  if (e == 0 || f == 0 || e > size_ || f > size_) throw DomainError("SingleExcursionMoments: bad edge");
  return second_moment(e, f) - mean(e) * mean(f);
}

double SingleExcursionMoments::mean_r() const {
  double s = 0.0;
  for (std::uint64_t e = 1; e <= size_; ++e) s += mean(e);
  return std::ldexp(s, -n_);
}

double SingleExcursionMoments::variance_r() const {
  double s = 0.0;
  for (std::uint64_t e = 1; e <= size_; ++e) {
    for (std::uint64_t f = 1; f <= size_; ++f) s += covariance(e, f);
  }
  return std::ldexp(s, -2 * n_);
}

double expected_cover_steps(int n) {
  if (n < 0 || n > 2) throw DomainError("expected_cover_steps: need 0 <= n <= 2");
  const std::uint64_t vertices = std::uint64_t{2} << n;  // heap ids 0..vertices-1, 0 = rho
  const std::uint64_t full = (std::uint64_t{1} << vertices) - 1;
  // Unknowns h(pos, mask) for masks not yet full; h = 0 at full.
  auto index = [&](std::uint64_t pos, std::uint64_t mask) {
    return static_cast<Eigen::Index>(mask * vertices + pos);
  };
  const auto m = static_cast<Eigen::Index>(vertices * (full + 1));
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(m, m);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(m);
  for (std::uint64_t mask = 0; mask < full; ++mask) {
    for (std::uint64_t pos = 0; pos < vertices; ++pos) {
      const auto row = index(pos, mask);
      b(row) = 1.0;
      for (auto [w, p] : moves(pos, n)) {
        const std::uint64_t next = mask | (std::uint64_t{1} << w);
        if (next != full) a(row, index(w, next)) -= p;
      }
    }
  }
  const Eigen::VectorXd h = a.partialPivLu().solve(b);
  return h(index(0, 1));
}

double single_excursion_cover_probability(int n) {
  if (n < 0 || n > 3) throw DomainError("single_excursion_cover_probability: need 0 <= n <= 3");
  const std::uint64_t vertices = std::uint64_t{2} << n;
  const std::uint64_t leaves = std::uint64_t{1} << n;
  const std::uint64_t full = (std::uint64_t{1} << leaves) - 1;
  // Unknowns q(pos, leaf mask) for pos != rho: probability of ending the
  // excursion with every leaf seen.
  auto index = [&](std::uint64_t pos, std::uint64_t mask) {
    return static_cast<Eigen::Index>(mask * (vertices - 1) + (pos - 1));
  };
  const auto m = static_cast<Eigen::Index>((vertices - 1) * (full + 1));
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(m, m);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(m);
  for (std::uint64_t mask = 0; mask <= full; ++mask) {
    for (std::uint64_t pos = 1; pos < vertices; ++pos) {
      const auto row = index(pos, mask);
      for (auto [w, p] : moves(pos, n)) {
        if (w == 0) {
          if (mask == full) b(row) += p;
          continue;
        }
        std::uint64_t next = mask;
        if (w >= leaves) next |= std::uint64_t{1} << (w - leaves);
        a(row, index(w, next)) -= p;
      }
    }
  }
  const Eigen::VectorXd q = a.partialPivLu().solve(b);
  return q(index(1, n == 0 ? 1 : 0));
}

double offspring_pmf(std::uint64_t i, std::uint64_t j) {
  // ways[a][b]: number of choice sequences (left/right, each probability 1/3)
  // with a lefts and b rights; the visit then ends with the parent choice.
  std::vector<std::vector<double>> ways(i + 1, std::vector<double>(j + 1, 0.0));
  ways[0][0] = 1.0;
  for (std::uint64_t x = 0; x <= i; ++x) {
    for (std::uint64_t y = 0; y <= j; ++y) {
      if (x > 0) ways[x][y] += ways[x - 1][y];
      if (y > 0) ways[x][y] += ways[x][y - 1];
    }
  }
  return ways[i][j] * std::pow(1.0 / 3.0, static_cast<double>(i + j + 1));
}

}  // namespace covertree::oracle
