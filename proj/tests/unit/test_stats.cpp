#include <catch_amalgamated.hpp>

#include <cmath>

#include "cellwave/error.hpp"
#include "cellwave/rng.hpp"
#include "cellwave/stats.hpp"

using namespace cellwave;
using Catch::Approx;

// Expected values from scipy.special.kolmogorov, scipy.special.kolmogorov at sqrt(mn/(m+n)) D,
// scipy.stats.chi2.sf and statsmodels' Dallal-Wilkinson pval_lf.

TEST_CASE("Kolmogorov survival function") {
  CHECK(kolmogorov_sf(0.3) == Approx(0.9999906941986655).epsilon(1e-10));
  CHECK(kolmogorov_sf(0.8) == Approx(0.5441424115741981).epsilon(1e-10));
  CHECK(kolmogorov_sf(1.0) == Approx(0.26999967167735456).epsilon(1e-10));
  CHECK(kolmogorov_sf(1.5) == Approx(0.022217962616525127).epsilon(1e-10));
  CHECK(kolmogorov_sf(2.5) == Approx(7.453306344157342e-06).epsilon(1e-8));
  CHECK(kolmogorov_sf(0.0) == 1.0);
}

TEST_CASE("Dallal-Wilkinson tail") {
  CHECK(lilliefors_tail(0.1, 50) == Approx(0.22867939286008154).epsilon(1e-12));
  CHECK(lilliefors_tail(0.05, 1000) == Approx(3.6429493082142905e-06).epsilon(1e-10));
  CHECK(lilliefors_tail(0.2, 30) == Approx(0.0035083988812977603).epsilon(1e-12));
}

TEST_CASE("two-sample KS") {
  std::vector<double> a(60), b(45);
  for (std::size_t k = 0; k < a.size(); ++k) a[k] = std::sin(1.3 * k) + 0.01 * k;
  for (std::size_t k = 0; k < b.size(); ++k) b[k] = std::cos(0.7 * k) * 1.2 + 0.3;
  const auto r = ks_two_sample(a, b);
  CHECK(r.statistic == Approx(0.18333333333333335).epsilon(1e-12));
  CHECK(r.p_value == Approx(0.3530890775856724).epsilon(1e-9));
  CHECK(ks_two_sample(a, a).p_value == 1.0);
  CHECK_THROWS_AS(ks_two_sample(a, std::vector<double>{}), ConfigError);
}

TEST_CASE("chi-square goodness of fit with pooling") {
  const std::vector<double> expected(8, 10.0);
  const std::vector<double> observed{17, 3, 13, 7, 12, 11, 9, 9};
  const auto r = chi_square_gof(observed, expected);
  CHECK(r.statistic == Approx(12.3));
  CHECK(r.dof == 7.0);
  CHECK(r.p_value == Approx(0.0911148860003131).epsilon(1e-10));

  // 1+1+1+2 pool into one bin of 5, the trailing 2 joins the last bin
  const auto pooled = chi_square_gof(std::vector<double>{1, 1, 1, 2, 6, 2}, std::vector<double>{1, 1, 1, 2, 5, 2});
  CHECK(pooled.dof == 1.0);
  CHECK(pooled.statistic == Approx(1.0 / 7.0));
  CHECK_THROWS_AS(chi_square_gof(std::vector<double>{1, 2}, std::vector<double>{1, 2}), ConfigError);
}

TEST_CASE("Mann-Kendall trend") {
  std::vector<double> up(10);
  for (int i = 0; i < 10; ++i) up[i] = i * i;
  const auto r = mann_kendall(up);
  CHECK(r.statistic == 45.0);
  CHECK(r.p_value == Approx(8.303070332644999e-05).epsilon(1e-10));
  std::vector<double> down(up.rbegin(), up.rend());
  CHECK(mann_kendall(down).statistic == -45.0);
  CHECK(mann_kendall(std::vector<double>(5, 1.0)).p_value == 1.0);
}

TEST_CASE("Lilliefors test is calibrated and rejects gross misfit") {
  NormalityTest test(1000, 7);
  int accepted = 0;
  std::vector<double> x(10000);
  for (int rep = 0; rep < 100; ++rep) {
    PhiloxStream rng(1234, static_cast<std::uint64_t>(rep));
    for (double& v : x) v = 3.0 + 2.0 * rng.normal();
    accepted += test(x).p_value > 0.01;
  }
  CHECK(accepted >= 95);

  PhiloxStream rng(99);
  for (double& v : x) v = rng.exponential(1.0);
  const auto r = test(x);
  CHECK(r.p_value < 1e-6);
  CHECK(r.statistic > 0.05);

  CHECK_THROWS_AS(test(std::vector<double>(19, 1.0)), ConfigError);
  CHECK_THROWS_AS(test(std::vector<double>(30, 1.0)), ConfigError);
}
