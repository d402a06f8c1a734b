#include "cellwave/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/distributions/chi_squared.hpp>

#include "cellwave/error.hpp"
#include "cellwave/rng.hpp"

namespace cellwave {

namespace {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

// sup |F_n - Phi| for already standardised, sorted values
double ks_sorted(std::span<const double> z) {
  const double n = static_cast<double>(z.size());
  double d = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double f = normal_cdf(z[i]);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

std::vector<double> standardised_sorted(std::span<const double> values) {
  const double n = static_cast<double>(values.size());
  double mean = 0.0;
  for (double x : values) mean += x;
  mean /= n;
  double var = 0.0;
  for (double x : values) var += (x - mean) * (x - mean);
  const double sd = std::sqrt(var / (n - 1.0));
  if (!(sd > 0.0)) throw ConfigError("normality test needs a sample with non-zero variance");
  std::vector<double> z(values.size());
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = (values[i] - mean) / sd;
  std::sort(z.begin(), z.end());
  return z;
}

}  // namespace

double kolmogorov_sf(double lambda) {
  if (lambda <= 0.0) return 1.0;
  constexpr double pi = std::numbers::pi;
  if (lambda < 1.0) {
    // theta-function form converges fast for small lambda
    double s = 0.0;
    for (int k = 1; k <= 20; ++k) {
      const double j = 2.0 * k - 1.0;
      s += std::exp(-j * j * pi * pi / (8.0 * lambda * lambda));
    }
    return std::clamp(1.0 - std::sqrt(2.0 * pi) / lambda * s, 0.0, 1.0);
  }
  double s = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    s += (k % 2 == 1 ? term : -term);
    if (term < 1e-300) break;
  }
  return std::clamp(2.0 * s, 0.0, 1.0);
}

double lilliefors_tail(double d, std::size_t n) {
  double nn = static_cast<double>(n);
  if (n > 100) {
    d *= std::pow(nn / 100.0, 0.49);
    nn = 100.0;
  }
  return std::exp(-7.01256 * d * d * (nn + 2.78019) + 2.99587 * d * std::sqrt(nn + 2.78019) - 0.122119 +
                  0.974598 / std::sqrt(nn) + 1.67997 / nn);
}

double NormalityTest::statistic(std::span<const double> values) {
  return ks_sorted(standardised_sorted(values));
}

const std::vector<double>& NormalityTest::null_for(std::size_t n) {
  std::lock_guard lock(mutex_);
  auto it = null_.find(n);
  if (it != null_.end()) return it->second;
  std::vector<double> stats(resamples_), sample(n);
  for (std::size_t r = 0; r < resamples_; ++r) {
    PhiloxStream rng(seed_, r);
    for (double& x : sample) x = rng.normal();
    stats[r] = statistic(sample);
  }
  std::sort(stats.begin(), stats.end());
  return null_.emplace(n, std::move(stats)).first->second;
}

TestResult NormalityTest::operator()(std::span<const double> values) {
  if (values.size() < 20) throw ConfigError("normality test needs at least 20 values");
  TestResult r;
  r.statistic = statistic(values);
  const auto& null = null_for(values.size());
  const auto exceed = static_cast<std::size_t>(null.end() - std::lower_bound(null.begin(), null.end(), r.statistic));
  const double floor = 1.0 / (static_cast<double>(resamples_) + 1.0);
  r.p_value = exceed == 0 ? std::min(floor, lilliefors_tail(r.statistic, values.size()))
                          : (static_cast<double>(exceed) + 1.0) * floor;
  return r;
}

TestResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw ConfigError("two-sample KS needs non-empty samples");
  std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double na = static_cast<double>(x.size()), nb = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  TestResult r;
  r.statistic = d;
  r.p_value = kolmogorov_sf(std::sqrt(na * nb / (na + nb)) * d);
  return r;
}

TestResult chi_square_gof(std::span<const double> observed, std::span<const double> expected, std::size_t fitted,
                          double min_expected) {
  if (observed.size() != expected.size() || observed.empty())
    throw ConfigError("observed and expected counts must have the same non-zero length");
  std::vector<std::pair<double, double>> bins;
  double o = 0.0, e = 0.0;
  for (std::size_t k = 0; k < observed.size(); ++k) {
    o += observed[k];
    e += expected[k];
    if (e >= min_expected) {
      bins.emplace_back(o, e);
      o = e = 0.0;
    }
  }
  if (e > 0.0 || o > 0.0) {
    if (bins.empty()) throw ConfigError("expected counts too small for a chi-square test");
    bins.back().first += o;
    bins.back().second += e;
  }
  if (bins.size() < fitted + 2) throw ConfigError("too few bins for a chi-square test");
  TestResult r;
  for (const auto& [ob, ex] : bins) r.statistic += (ob - ex) * (ob - ex) / ex;
  r.dof = static_cast<double>(bins.size() - 1 - fitted);
  r.p_value = boost::math::cdf(boost::math::complement(boost::math::chi_squared(r.dof), r.statistic));
  return r;
}

TestResult mann_kendall(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n < 3) throw ConfigError("trend test needs at least three values");
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) s += (x[j] > x[i]) - (x[j] < x[i]);
  std::vector<double> sorted(x.begin(), x.end());
  std::sort(sorted.begin(), sorted.end());
  const double nn = static_cast<double>(n);
  double var = nn * (nn - 1.0) * (2.0 * nn + 5.0);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && sorted[j] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i);
    var -= t * (t - 1.0) * (2.0 * t + 5.0);
    i = j;
  }
  var /= 18.0;
  TestResult r;
  r.statistic = s;
  if (var <= 0.0) return r;
  const double z = s > 0.0 ? (s - 1.0) / std::sqrt(var) : s < 0.0 ? (s + 1.0) / std::sqrt(var) : 0.0;
  r.p_value = std::erfc(std::abs(z) / std::numbers::sqrt2);
  return r;
}

}  // namespace cellwave
