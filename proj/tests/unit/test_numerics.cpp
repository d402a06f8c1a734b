#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "cellwave/error.hpp"
#include "cellwave/rng.hpp"
#include "cellwave/trace.hpp"
#include "cellwave/tridiag.hpp"

using namespace cellwave;

TEST_CASE("philox known-answer vectors") {
  using C = Philox4x32::Counter;
  CHECK(Philox4x32::generate({0, 0, 0, 0}, {0, 0}) == C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(Philox4x32::generate({~0u, ~0u, ~0u, ~0u}, {~0u, ~0u}) ==
        C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(Philox4x32::generate({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("log and sincos kernels track libm") {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst_log = 0.0, worst_trig = 0.0;
  for (int i = 0; i < 200000; ++i) {
    const double x = i % 4 == 0 ? std::exp(-700.0 * unit(gen)) : unit(gen);
    if (x <= 0.0) continue;
    const double ref = std::log(x);
    const double err = std::abs(detail::log_unit(x) - ref);
    worst_log = std::max(worst_log, ref == 0.0 ? err : err / std::abs(ref));
    double s = 0, c = 0;
    detail::sincos_turn(x, s, c);
    worst_trig = std::max({worst_trig, std::abs(s - std::sin(2 * std::numbers::pi * x)),
                           std::abs(c - std::cos(2 * std::numbers::pi * x))});
  }
  CHECK(detail::log_unit(1.0) == 0.0);
  CHECK(worst_log < 4e-16);
  CHECK(worst_trig < 2e-15);
}

TEST_CASE("normal draws are indexed, not streamed") {
  std::vector<double> a(1001), b(600);
  fill_normals(11, 5, 0, a);
  fill_normals(11, 5, 401, b);
  for (std::size_t i = 0; i < b.size(); ++i) REQUIRE(b[i] == a[401 + i]);
  for (std::size_t d = 0; d < a.size(); d += 37) REQUIRE(a[d] == normal_draw(11, 5, d));
  CHECK(normal_draw(11, 6, 0) != a[0]);
  CHECK(normal_draw(12, 5, 0) != a[0]);
}

TEST_CASE("normal draw moments") {
  std::vector<double> z(200000);
  fill_normals(2024, 0, 0, z);
  double mean = 0, m2 = 0, m4 = 0;
  for (double v : z) mean += v;
  mean /= z.size();
  for (double v : z) {
    m2 += (v - mean) * (v - mean);
    m4 += std::pow(v - mean, 4);
  }
  m2 /= z.size();
  m4 /= z.size();
  CHECK(std::abs(mean) < 0.01);
  CHECK(std::abs(m2 - 1.0) < 0.02);
  CHECK(std::abs(m4 / (m2 * m2) - 3.0) < 0.1);
  // lag-1 correlation, pairs included
  double c = 0;
  for (std::size_t i = 1; i < z.size(); ++i) c += z[i] * z[i - 1];
  CHECK(std::abs(c / z.size()) < 0.01);
}

TEST_CASE("philox stream exponential mean") {
  PhiloxStream rng(9);
  double sum = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) sum += rng.exponential(4.0);
  CHECK(std::abs(sum / n - 0.25) < 4 * 0.25 / std::sqrt(n));
  PhiloxStream a(9, 1), b(9, 1);
  for (int i = 0; i < 10; ++i) REQUIRE(a.next_u32() == b.next_u32());
}

TEST_CASE("cyclic tridiagonal against dense product") {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (std::size_t n : {3u, 4u, 9u, 64u, 257u}) {
    for (double off : {-0.3, -4.5, 0.0}) {
      const double diag = 1.0 - 2.0 * off;
      CyclicTridiagonal t(n, diag, off);
      std::vector<double> b(n), x(n);
      for (auto& v : b) v = u(gen);
      x = b;
      t.solve(x);
      double worst = 0;
      for (std::size_t k = 0; k < n; ++k) {
        const double ax = diag * x[k] + off * (x[(k + n - 1) % n] + x[(k + 1) % n]);
        worst = std::max(worst, std::abs(ax - b[k]));
      }
      INFO("n=" << n << " off=" << off);
      CHECK(worst < 1e-12);
    }
  }
}

namespace {

SimulationTrace sample_trace() {
  TraceMeta meta;
  meta.scheme = Scheme::Cle;
  meta.variant = NoiseVariant::CleNoDiffusionNoise;
  meta.grid = Grid1D(40.0, 16);
  meta.dt = 1e-3;
  meta.stride = 10;
  meta.sigma = 0.05;
  meta.seed = 77;
  meta.species = {"u", "v"};
  SimulationTrace tr(meta);
  std::vector<double> vals(32);
  for (int i = 0; i < 3; ++i) {
    for (std::size_t k = 0; k < vals.size(); ++k) vals[k] = i + 0.1 * k;
    tr.append(0.01 * i, vals);
  }
  return tr;
}

}  // namespace

TEST_CASE("trace binary round trip") {
  const auto tr = sample_trace();
  std::stringstream ss;
  write_trace(ss, tr);
  const std::string bytes = ss.str();
  CHECK(bytes.substr(0, 8) == "RDSTRACE");
  std::istringstream in(bytes);
  const auto back = read_trace(in);
  CHECK(back == tr);
  CHECK(back.field(2, 1)[3] == tr.field(2, 1)[3]);
  CHECK(back.state(1).values == std::vector<double>(tr.snapshot(1).begin(), tr.snapshot(1).end()));

  std::istringstream truncated(bytes.substr(0, bytes.size() - 5));
  CHECK_THROWS_AS(read_trace(truncated), ConfigError);
  std::string bad = bytes;
  bad[0] = 'X';
  std::istringstream wrong(bad);
  CHECK_THROWS_AS(read_trace(wrong), ConfigError);
}

TEST_CASE("trace times must increase") {
  auto tr = sample_trace();
  std::vector<double> vals(32, 0.0);
  CHECK_THROWS_AS(tr.append(0.02, vals), ConfigError);
  CHECK_THROWS_AS(tr.append(1.0, std::vector<double>(31)), ConfigError);
}

TEST_CASE("trace csv export") {
  std::ostringstream os;
  write_trace_csv(os, sample_trace());
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "t,x,species,value");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 3 * 2 * 16);
}

TEST_CASE("scheme and variant names round trip") {
  for (auto v : {NoiseVariant::None, NoiseVariant::FullCleFormA, NoiseVariant::FullCleFormB,
                 NoiseVariant::CleNoDiffusionNoise, NoiseVariant::AdditiveWhiteU})
    CHECK(parse_variant(variant_name(v)) == v);
  for (auto s : {Scheme::Rde, Scheme::Cle, Scheme::Ssa}) CHECK(parse_scheme(scheme_name(s)) == s);
  CHECK_THROWS_AS(parse_variant("full"), ConfigError);
  CHECK_THROWS_AS(Grid1D(40.0, 4), ConfigError);
  CHECK_THROWS_AS(Grid1D(-1.0, 64), ConfigError);
}
