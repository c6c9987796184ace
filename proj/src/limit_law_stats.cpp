#include "covertree/limit_law_stats.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/special_functions/lambert_w.hpp>
#include <cmath>
#include <numbers>
#include <numeric>

#include "covertree/distributions.hpp"
#include "covertree/errors.hpp"

namespace covertree {

EmpiricalDistribution::EmpiricalDistribution(std::vector<double> values, Provenance provenance)
    : sorted_(std::move(values)), provenance_(std::move(provenance)) {
  if (sorted_.empty()) throw DataError("EmpiricalDistribution: empty sample");
  for (double v : sorted_) {
    if (!std::isfinite(v)) throw DataError("EmpiricalDistribution: non-finite value");
  }
  std::sort(sorted_.begin(), sorted_.end());
}

double EmpiricalDistribution::cdf(double x) const {
  const auto k = std::upper_bound(sorted_.begin(), sorted_.end(), x) - sorted_.begin();
  return static_cast<double>(k) / static_cast<double>(sorted_.size());
}

std::size_t EmpiricalDistribution::count_above(double x) const {
  return static_cast<std::size_t>(sorted_.end() - std::upper_bound(sorted_.begin(), sorted_.end(), x));
}

double EmpiricalDistribution::quantile(double p) const {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("quantile: p outside [0, 1]");
  const double h = p * static_cast<double>(sorted_.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted_.size()) return sorted_.back();
  return sorted_[lo] + (h - static_cast<double>(lo)) * (sorted_[lo + 1] - sorted_[lo]);
}

double EmpiricalDistribution::mean() const {
  return std::accumulate(sorted_.begin(), sorted_.end(), 0.0) / static_cast<double>(sorted_.size());
}

double kolmogorov_q(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 1.18) {
    // Jacobi-transformed series, fast for small lambda.
    const double y = std::exp(-std::numbers::pi * std::numbers::pi / (8.0 * lambda * lambda));
    double sum = 0.0;
    for (int k = 1; k <= 7; k += 2) sum += std::pow(y, k * k);
    return std::clamp(1.0 - std::sqrt(2.0 * std::numbers::pi) / lambda * sum, 0.0, 1.0);
  }
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-17) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

TestResult ks_two_sample(const EmpiricalDistribution& a, const EmpiricalDistribution& b) {
  const auto x = a.values();
  const auto y = b.values();
  const double na = static_cast<double>(x.size());
  const double nb = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double ne = std::sqrt(na * nb / (na + nb));
  return {d, kolmogorov_q((ne + 0.12 + 0.11 / ne) * d)};
}

CategoryCounts tabulate(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b) {
  CategoryCounts c;
  for (auto k : a) ++c[k].first;
  for (auto k : b) ++c[k].second;
  return c;
}

ChiSquareResult chi_square_two_sample(const CategoryCounts& counts, std::uint64_t min_pooled) {
  std::vector<std::pair<double, double>> bins;
  std::pair<double, double> pooled{0.0, 0.0};
  double na = 0.0, nb = 0.0;
  for (const auto& [key, ab] : counts) {
    na += static_cast<double>(ab.first);
    nb += static_cast<double>(ab.second);
    if (ab.first + ab.second < min_pooled) {
      pooled.first += static_cast<double>(ab.first);
      pooled.second += static_cast<double>(ab.second);
    } else {
      bins.emplace_back(static_cast<double>(ab.first), static_cast<double>(ab.second));
    }
  }
  if (pooled.first + pooled.second > 0) bins.push_back(pooled);
  if (na == 0 || nb == 0) throw DataError("chi_square_two_sample: empty sample");
  ChiSquareResult r;
  r.categories = static_cast<int>(bins.size());
  r.dof = r.categories - 1;
  if (r.dof < 1) return r;
  const double ka = std::sqrt(nb / na), kb = std::sqrt(na / nb);
  for (const auto& [x, y] : bins) {
    const double diff = ka * x - kb * y;
    r.statistic += diff * diff / (x + y);
  }
  const boost::math::chi_squared dist(r.dof);
  r.p_value = boost::math::cdf(boost::math::complement(dist, r.statistic));
  return r;
}

TailFit tail_fit(const EmpiricalDistribution& d, double z_lo, double z_hi, double step,
                 std::size_t min_exceed) {
  if (!(step > 0.0) || !(z_hi >= z_lo)) throw DomainError("tail_fit: bad window");
  TailFit fit;
  const double n = static_cast<double>(d.size());
  for (double z = z_lo; z <= z_hi + 1e-12; z += step) {
    if (z <= 0.0) continue;
    const std::size_t k = d.count_above(z);
    if (k < min_exceed) continue;
    fit.z.push_back(z);
    fit.survival.push_back(static_cast<double>(k) / n);
  }
  const auto m = static_cast<Eigen::Index>(fit.z.size());
  if (m < 5) {
    throw AccuracyError("tail_fit: " + std::to_string(m) + " grid points with >= " +
                        std::to_string(min_exceed) +
                        " exceedances; at least 5 are needed (enlarge the sample or lower the window)");
  }
  Eigen::MatrixXd x(m, 2);
  Eigen::VectorXd y(m);
  Eigen::MatrixXd cov(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    x(i, 0) = 1.0;
    x(i, 1) = -fit.z[i];
    y(i) = std::log(fit.survival[i]) - std::log(fit.z[i]);
    for (Eigen::Index j = 0; j < m; ++j) {
      // Delta method: Cov(log S_i, log S_j) = (1 / S_min(i,j) - 1) / N for z increasing.
      const double s = fit.survival[std::min(i, j)];
      cov(i, j) = (1.0 / s - 1.0) / n;
    }
  }
  const Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) throw AccuracyError("tail_fit: singular covariance");
  const Eigen::MatrixXd wx = llt.solve(x);
  const Eigen::Matrix2d info = x.transpose() * wx;
  const Eigen::Matrix2d inv = info.inverse();
  const Eigen::Vector2d beta = inv * (wx.transpose() * y);
  fit.alpha = std::exp(beta(0));
  fit.c = beta(1);
  fit.alpha_se = fit.alpha * std::sqrt(inv(0, 0));
  fit.c_se = std::sqrt(inv(1, 1));
  return fit;
}

std::vector<double> sample_exact_tail(std::size_t count, double alpha, double c, Rng& rng) {
  if (!(alpha > 0.0) || !(c > 0.0)) throw DomainError("sample_exact_tail: alpha, c must be positive");
  const double peak = 1.0 / c;
  // Start of the tail: where alpha z e^{-cz} has come down to 1, or the peak.
  double z0 = peak;
  if (alpha * peak * std::exp(-1.0) > 1.0) z0 = -boost::math::lambert_wm1(-c / alpha) / c;
  const double s0 = alpha * z0 * std::exp(-c * z0);
  std::vector<double> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double u = uniform01(rng);
    if (u >= s0) {
      out.push_back(z0 + std::log(uniform01(rng)));
      continue;
    }
    // alpha z e^{-cz} = u on the decreasing branch: z = -W_{-1}(-c u / alpha) / c.
    out.push_back(-boost::math::lambert_wm1(-c * u / alpha) / c);
  }
  return out;
}

MixtureCdf::MixtureCdf(double alpha, double c, std::span<const double> x) : alpha_(alpha), c_(c) {
  if (!(alpha >= 0.0) || !(c > 0.0)) throw DomainError("MixtureCdf: need alpha >= 0, c > 0");
  for (double v : x) {
    if (v > 0.0) x_.push_back(v);
  }
  if (x_.empty()) throw DataError("MixtureCdf: no positive X' samples");
  excluded_ = 1.0 - static_cast<double>(x_.size()) / static_cast<double>(x.size());
}

double MixtureCdf::operator()(double y) const {
  const double k = alpha_ * std::exp(-c_ * y);
  double acc = 0.0;
  for (double v : x_) acc += std::exp(-k * v);
  return acc / static_cast<double>(x_.size());
}

double MixtureCdf::sample(Rng& rng) const {
  const auto i = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(x_.size()));
  const double e = -std::log(uniform01(rng));
  return (std::log(alpha_ * x_[std::min(i, x_.size() - 1)]) - std::log(e)) / c_;
}

namespace {

/// M_1(y) = mean exp(-X e^{-c y}) tabulated on a uniform grid.
class UnitMixtureTable {
 public:
  UnitMixtureTable(std::span<const double> x, double c) {
    const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
    y0_ = std::log(*lo) / c - 6.0;
    const double y1 = std::log(*hi) / c + 35.0;
    const auto size = static_cast<std::size_t>(std::ceil((y1 - y0_) / kStep)) + 1;
    values_.resize(size);
    for (std::size_t i = 0; i < size; ++i) {
      const double k = std::exp(-c * (y0_ + kStep * static_cast<double>(i)));
      double acc = 0.0;
      for (double v : x) acc += std::exp(-k * v);
      values_[i] = acc / static_cast<double>(x.size());
    }
  }

  double operator()(double y) const {
    const double u = (y - y0_) / kStep;
    if (u <= 0.0) return values_.front();
    if (u >= static_cast<double>(values_.size() - 1)) return values_.back();
    const auto i = static_cast<std::size_t>(u);
    const double f = u - static_cast<double>(i);
    return values_[i] + f * (values_[i + 1] - values_[i]);
  }

  double lo() const { return y0_; }
  double hi() const { return y0_ + kStep * static_cast<double>(values_.size() - 1); }

 private:
  static constexpr double kStep = 0.004;
  double y0_ = 0.0;
  std::vector<double> values_;
};

}  // namespace

MixtureFit mixture_cdf_fit(const EmpiricalDistribution& d, std::span<const double> x, double c) {
  const MixtureCdf unit(1.0, c, x);
  const UnitMixtureTable table(unit.weights(), c);
  // M_alpha(y) = M_1(y - tau) with tau = ln(alpha) / c.
  auto ks_at = [&](double tau) { return ks_distance(d, [&](double y) { return table(y - tau); }); };
  const auto v = d.values();
  const double tau_lo = v.front() - table.hi();
  const double tau_hi = v.back() - table.lo();
  const int points = 600;
  const double h = (tau_hi - tau_lo) / points;
  double best_tau = tau_lo, best = 2.0;
  for (int i = 0; i <= points; ++i) {
    const double tau = tau_lo + h * i;
    const double k = ks_at(tau);
    if (k < best) {
      best = k;
      best_tau = tau;
    }
  }
  // Golden-section refinement within one coarse step either side.
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = best_tau - h, b = best_tau + h;
  double x1 = b - g * (b - a), x2 = a + g * (b - a);
  double f1 = ks_at(x1), f2 = ks_at(x2);
  for (int it = 0; it < 60 && b - a > 1e-9; ++it) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - g * (b - a);
      f1 = ks_at(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (b - a);
      f2 = ks_at(x2);
    }
  }
  const double tau = f1 < f2 ? x1 : x2;
  MixtureFit fit;
  fit.excluded_fraction = unit.excluded_fraction();
  if (std::min(f1, f2) <= best) {
    fit.alpha = std::exp(c * tau);
    fit.ks = std::min(f1, f2);
  } else {
    fit.alpha = std::exp(c * best_tau);
    fit.ks = best;
  }
  return fit;
}

ShiftReport shift_test(const EmpiricalDistribution& cover, const EmpiricalDistribution& tstar, Rng& rng,
                       double control_sd) {
  if (cover.provenance().n != tstar.provenance().n) {
    throw DomainError("shift_test: cover and tstar samples come from different n");
  }
  std::vector<double> shifted, control;
  for (double v : cover.values()) {
    const double g = standard_normal(rng);
    shifted.push_back(v - g);
    control.push_back(v - control_sd * g);
  }
  ShiftReport r;
  r.control_sd = control_sd;
  r.shifted = ks_two_sample(EmpiricalDistribution(std::move(shifted)), tstar);
  r.control = ks_two_sample(EmpiricalDistribution(std::move(control)), tstar);
  return r;
}

}  // namespace covertree
