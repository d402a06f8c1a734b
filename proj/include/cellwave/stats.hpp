#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <span>
#include <vector>

namespace cellwave {

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  double dof = 0.0;  // chi-square only
};

/// Asymptotic Kolmogorov survival function P(K > lambda).
double kolmogorov_sf(double lambda);

/// Dallal-Wilkinson approximation to the Lilliefors tail; meaningful below 0.1.
double lilliefors_tail(double d, std::size_t n);

/// One-sample KS against a normal with the sample mean and standard deviation
/// (Lilliefors). p-values come from a Monte-Carlo null of `resamples` standard
/// normal samples of the same size, cached per size. When D exceeds every
/// null draw the Dallal-Wilkinson tail is reported instead, capped at the
/// Monte-Carlo floor 1/(resamples+1).
class NormalityTest {
 public:
  explicit NormalityTest(std::size_t resamples = 1000, std::uint64_t seed = 20240101)
      : resamples_(resamples), seed_(seed) {}

  /// Throws ConfigError with fewer than 20 values or zero variance.
  TestResult operator()(std::span<const double> values);

  /// KS distance between the standardised sample and the standard normal.
  static double statistic(std::span<const double> values);

 private:
  const std::vector<double>& null_for(std::size_t n);

  std::size_t resamples_;
  std::uint64_t seed_;
  std::mutex mutex_;
  std::map<std::size_t, std::vector<double>> null_;  // sorted null statistics
};

/// Two-sample KS; p = P(K > sqrt(mn/(m+n)) D) from the limiting Kolmogorov law.
TestResult ks_two_sample(std::span<const double> a, std::span<const double> b);

/// Pearson goodness of fit. Adjacent bins are merged left to right until each
/// expected count reaches `min_expected`; dof = bins - 1 - fitted.
TestResult chi_square_gof(std::span<const double> observed, std::span<const double> expected,
                          std::size_t fitted = 0, double min_expected = 5.0);

/// Mann-Kendall trend test with the tie-corrected variance. statistic holds
/// S; p_value is two-sided from the continuity-corrected normal score.
TestResult mann_kendall(std::span<const double> series);

}  // namespace cellwave
