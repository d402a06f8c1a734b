#include <catch_amalgamated.hpp>

#include <cmath>
#include <numeric>
#include <sstream>

#include "cellwave/error.hpp"
#include "cellwave/model_io.hpp"
#include "cellwave/ssa.hpp"

using namespace cellwave;

namespace {

ReactionNetwork birth_death(double D = 0.0) {
  return parse_model("[parameters]\na1 = 0.167\na5 = 1.47\n[species]\nu : " + std::to_string(D) +
                     "\n[reactions]\na5 : u += 1\na1*u : u += -1\n");
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> t(n);
  for (int i = 0; i < n; ++i) t[i] = a + (b - a) * i / (n - 1);
  return t;
}

}  // namespace

TEST_CASE("count conversion rounds densities") {
  FieldState f(1, 8);
  f.values = {0.0, 0.0523, 1.0, 0.0004, 0.0006, 2.5, -0.1, 3.14159};
  const auto c = to_counts(f, 1000.0);
  CHECK(c.counts[0] == 0);
  CHECK(c.counts[1] == 52);
  CHECK(c.counts[3] == 0);
  CHECK(c.counts[4] == 1);
  CHECK(c.counts[6] == 0);
  const auto back = from_counts(c);
  for (std::size_t i = 0; i < 8; ++i)
    if (f.values[i] >= 0.0) CHECK(std::abs(back.values[i] - f.values[i]) <= 0.5 / 1000.0 + 1e-15);
  CHECK_THROWS_AS(to_counts(f, 0.0), ConfigError);
}

TEST_CASE("hops conserve molecules") {
  const auto net = parse_model("[species]\nu : 1\n[reactions]\n");
  const Grid1D g(32.0, 32);
  CountState c0{0.0, 1, 32, 1.0, std::vector<std::int64_t>(32, 0)};
  c0.counts[5] = 1000;
  const auto times = linspace(0.0, 20.0, 11);
  const auto res = simulate_ssa(net, g, c0, 20.0, 3, times);
  REQUIRE(res.trace.snapshot_count() == 11);
  for (std::size_t i = 0; i < 11; ++i) {
    const auto f = res.trace.field(i, 0);
    CHECK(std::accumulate(f.begin(), f.end(), 0.0) == 1000.0);
  }
  // spreading: the initial cell no longer holds everything
  CHECK(res.trace.field(10, 0)[5] < 200.0);
  CHECK(res.events > 10000);
}

TEST_CASE("birth-death mean approaches a5 omega / a1") {
  const auto net = birth_death();
  const Grid1D g(8.0, 8);
  const double omega = 5.0, mean_target = 1.47 * omega / 0.167;
  CountState c0{0.0, 1, 8, omega, std::vector<std::int64_t>(8, 0)};
  const auto times = linspace(30.0, 2030.0, 201);  // spacing ~1.7 correlation times
  const auto res = simulate_ssa(net, g, c0, 2030.0, 17, times);
  double sum = 0, sum2 = 0;
  int samples = 0;
  for (std::size_t i = 0; i < res.trace.snapshot_count(); ++i)
    for (double d : res.trace.field(i, 0)) {
      const double cnt = d * omega;
      sum += cnt;
      sum2 += cnt * cnt;
      ++samples;
    }
  const double mean = sum / samples, var = sum2 / samples - mean * mean;
  CHECK(std::abs(mean - mean_target) < 4.0 * std::sqrt(mean_target / samples) * 1.5);
  CHECK(var / mean == Catch::Approx(1.0).epsilon(0.15));
}

TEST_CASE("ssa is reproducible per seed") {
  const auto net = birth_death(0.5);
  const Grid1D g(8.0, 16);
  CountState c0{0.0, 1, 16, 20.0, std::vector<std::int64_t>(16, 3)};
  const auto times = linspace(0.0, 5.0, 6);
  auto run = [&](std::uint64_t seed) {
    std::ostringstream os;
    write_trace(os, simulate_ssa(net, g, c0, 5.0, seed, times).trace);
    return os.str();
  };
  CHECK(run(4) == run(4));
  CHECK(run(4) != run(5));
}

TEST_CASE("absorbing state terminates early but fills snapshots") {
  const auto net = parse_model("[parameters]\nk = 5\n[species]\nu : 0\n[reactions]\nk*u : u += -1\n");
  const Grid1D g(8.0, 8);
  CountState c0{0.0, 1, 8, 1.0, std::vector<std::int64_t>(8, 2)};
  const auto times = linspace(0.0, 100.0, 5);
  const auto res = simulate_ssa(net, g, c0, 100.0, 1, times);
  CHECK(res.terminated_early);
  CHECK(res.events == 16);
  REQUIRE(res.trace.snapshot_count() == 5);
  for (double v : res.trace.field(4, 0)) CHECK(v == 0.0);
}

TEST_CASE("reactions never drive counts negative") {
  // constant-rate sink: fires only while molecules remain
  const auto net = parse_model("[parameters]\nk = 2\n[species]\nu : 0\n[reactions]\nk : u += -1\nk : u += 1\n");
  const Grid1D g(8.0, 8);
  CountState c0{0.0, 1, 8, 1.0, std::vector<std::int64_t>(8, 0)};
  const auto times = linspace(0.0, 50.0, 101);
  const auto res = simulate_ssa(net, g, c0, 50.0, 2, times);
  for (std::size_t i = 0; i < res.trace.snapshot_count(); ++i)
    for (double v : res.trace.field(i, 0)) REQUIRE(v >= 0.0);
}
