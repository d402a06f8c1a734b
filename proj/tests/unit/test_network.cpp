#include <catch_amalgamated.hpp>

#include <random>

#include "cellwave/error.hpp"
#include "cellwave/network.hpp"
#include "oracles.hpp"

using namespace cellwave;
using Catch::Approx;

TEST_CASE("builtin model structure", "[network]") {
  const auto net = builtin_bhatt_model(ModelParameters::baseline());
  REQUIRE(net.species_count() == 2);
  REQUIRE(net.reaction_count() == 6);
  const int s[2][6] = {{-1, -1, 1, 1, 0, 0}, {0, 0, 0, 0, -1, 1}};
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 6; ++j) CHECK(net.stoich(i, j) == s[i][j]);
  CHECK(net.noise_covariance_diagonal());
  CHECK(net.diffusion_coefficients() == std::vector<double>{0.1, 1.0});
}

TEST_CASE("propensities and drift at reference states", "[network]") {
  const auto p = ModelParameters::baseline();
  const auto net = builtin_bhatt_model(p);
  const double zero[] = {0.0, 0.0};
  CHECK(net.evaluate_propensities(zero) == std::vector<double>{0, 0, 0, 1.47, 0, 0});
  CHECK(net.drift(zero) == std::vector<double>{1.47, 0.0});

  const double one[] = {1.0, 1.0};
  const auto r = net.evaluate_propensities(one);
  const double expect[] = {0.167, 16.67, 167.0 / 2.44, 1.47, 0.052, 2.028};
  for (int j = 0; j < 6; ++j) CHECK(r[j] == Approx(expect[j]).epsilon(1e-14));
  const auto f = net.drift(one);
  CHECK(f[0] == Approx(-0.167 - 16.67 + 167.0 / 2.44 + 1.47).epsilon(1e-14));
  CHECK(f[1] == Approx(0.52 * (-0.1 + 3.9)).epsilon(1e-14));
}

TEST_CASE("drift matches the hand-coded right-hand side", "[network]") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> d(0.0, 5.0);
  for (auto p : {ModelParameters::baseline(), ModelParameters::wild_type(), ModelParameters::pten_null()}) {
    const auto net = builtin_bhatt_model(p);
    for (int i = 0; i < 1000; ++i) {
      const double x[] = {d(rng), d(rng)};
      const auto f = net.drift(x);
      const auto g = oracle::bhatt_rhs(p, x[0], x[1]);
      CHECK(std::abs(f[0] - g[0]) <= 1e-12 * std::max(1.0, std::abs(g[0])));
      CHECK(std::abs(f[1] - g[1]) <= 1e-12 * std::max(1.0, std::abs(g[1])));
    }
  }
}

TEST_CASE("drift vanishes at the background state", "[network]") {
  auto p = ModelParameters::baseline();
  const double s1[] = {0.052293, 0.052293 * 39.0};
  auto f = builtin_bhatt_model(p).drift(s1);
  CHECK(std::abs(f[0]) < 1e-3);
  CHECK(std::abs(f[1]) < 1e-3);
  p.c1 = 0.2;
  const double s2[] = {0.083339, 0.083339 * 3.9 / 0.2};
  f = builtin_bhatt_model(p).drift(s2);
  CHECK(std::abs(f[0]) < 1e-3);
  CHECK(std::abs(f[1]) < 1e-3);
}

TEST_CASE("network validation", "[network]") {
  CHECK_THROWS_AS(ReactionNetwork({{"u", -1.0}}, {}, {}), ModelError);
  CHECK_THROWS_AS(ReactionNetwork({{"u", 1.0}, {"u", 1.0}}, {}, {}), ModelError);
  CHECK_THROWS_AS(ReactionNetwork({{"u", 1.0}}, {{Expr::symbol("k"), {1}}}, {}), ModelError);
  CHECK_THROWS_AS(ReactionNetwork({{"u", 1.0}}, {{Expr::constant(1), {0}}}, {}), ModelError);
  CHECK_THROWS_AS(ReactionNetwork({{"u", 1.0}}, {{Expr::constant(1), {1, 0}}}, {}), ModelError);
  CHECK_THROWS_AS(ReactionNetwork({{"u", 1.0}}, {}, {{"u", 1.0}}), ModelError);
  auto bad = ModelParameters::baseline();
  bad.c1 = 0.0;
  CHECK_THROWS_AS(builtin_bhatt_model(bad), ModelError);
}

TEST_CASE("covariance diagonality detects coupled reactions", "[network]") {
  const ReactionNetwork net({{"a", 1.0}, {"b", 1.0}},
                            {{Expr::symbol("a"), {-1, 1}}}, {});
  CHECK_FALSE(net.noise_covariance_diagonal());
}

TEST_CASE("parameter recovery", "[network]") {
  const auto p = ModelParameters::pten_null();
  CHECK(bhatt_parameters(builtin_bhatt_model(p)) == p);
}
