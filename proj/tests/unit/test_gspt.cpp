#include <catch_amalgamated.hpp>

#include <cmath>

#include "cellwave/error.hpp"
#include "cellwave/gspt.hpp"

using namespace cellwave;
using Catch::Approx;

// Frozen from scipy: bounded minimisation of the u-nullcline v(u) and brentq
// on H(u+,0) - H(u-,0) with numpy cubic roots.
constexpr double kFoldLo = 1.5495084173867615;
constexpr double kFoldHi = 4.238291072447396;
constexpr double kVbar = 3.9261460600848457;

TEST_CASE("manifold branches satisfy the algebraic equation") {
  const auto p = ModelParameters::baseline();
  for (double v = 0.0; v <= 12.0; v += 0.01) {
    const auto s = manifold_branches(p, v);
    REQUIRE((s.roots.size() == 1 || s.roots.size() == 3));
    REQUIRE(std::is_sorted(s.roots.begin(), s.roots.end()));
    for (double u : s.roots) REQUIRE(std::abs(fast_nullcline(p, u, v)) < 1e-10);
    const bool inside = v > kFoldLo + 1e-6 && v < kFoldHi - 1e-6;
    const bool outside = v < kFoldLo - 1e-6 || v > kFoldHi + 1e-6;
    if (inside) REQUIRE(s.three_branches());
    if (outside) REQUIRE(!s.three_branches());
  }
  CHECK(manifold_branches(p, 2.0394).lower() == Approx(0.0523).margin(2e-4));
  const double big = 1e6;
  CHECK(manifold_branches(p, big).lower() == Approx(p.a5 / (p.a1 + p.a2 * big)).epsilon(1e-4));
  CHECK_THROWS_AS(manifold_branches(p, -1.0), ConfigError);
}

TEST_CASE("fold interval and jump value") {
  const auto p = ModelParameters::baseline();
  const auto f = fold_interval(p);
  REQUIRE(f);
  CHECK(f->v_lo == Approx(kFoldLo).epsilon(1e-10));
  CHECK(f->v_hi == Approx(kFoldHi).epsilon(1e-10));
  const auto j = jump_value(p);
  CHECK(j.vbar == Approx(kVbar).epsilon(1e-10));
  // independent re-evaluation of both branches and the Hamiltonian
  const auto s = manifold_branches(p, j.vbar);
  REQUIRE(s.three_branches());
  CHECK(std::abs(fast_hamiltonian(p, j.vbar, s.upper(), 0.0) - fast_hamiltonian(p, j.vbar, s.lower(), 0.0)) <
        1e-10);
}

TEST_CASE("jump value ignores the inhibitor parameters") {
  const auto base = jump_value(ModelParameters::baseline()).vbar;
  auto p = ModelParameters::baseline();
  p.c1 = 0.37;
  p.c2 = 1.3;
  p.eps = 2.0;
  p.Du = 0.01;
  CHECK(jump_value(p).vbar == base);
  CHECK(jump_value(ModelParameters::wild_type()).vbar == base);  // same a1..a5
  CHECK(jump_value(ModelParameters::pten_null()).vbar != base);
}

TEST_CASE("no fold means no jump") {
  auto p = ModelParameters::baseline();
  p.a3 = 5.0;
  CHECK_FALSE(fold_interval(p));
  CHECK_THROWS_AS(jump_value(p), AnalysisError);
}

TEST_CASE("hamiltonian gradient and conservation") {
  const auto p = ModelParameters::baseline();
  CHECK(fast_hamiltonian(p, 3.0, 0.0, 0.0) == 0.0);
  double worst = 0;
  for (double vb = 1.0; vb <= 5.0; vb += 0.25)
    for (double u = 0.01; u <= 3.0; u += 0.01) {
      const double h = 1e-5 * std::max(1.0, u);
      const double fd = (fast_hamiltonian(p, vb, u + h, 0.3) - fast_hamiltonian(p, vb, u - h, 0.3)) / (2 * h);
      const double an = fast_hamiltonian_du(p, vb, u);
      worst = std::max(worst, std::abs(fd - an) / std::max(1.0, std::abs(an)));
    }
  CHECK(worst < 1e-6);

  // orbit through the middle of the jump at vbar, both directions
  const auto j = jump_value(p);
  const double h0 = fast_hamiltonian(p, j.vbar, j.u_minus, 0.0);
  const double um = 0.5 * (j.u_minus + j.u_plus);
  const double pm = std::sqrt(2.0 * (h0 - fast_hamiltonian(p, j.vbar, um, 0.0)));
  double drift = 0;
  double u_lo = um, u_hi = um;
  for (double end : {12.0, -12.0}) {
    for (const auto& s : fast_orbit(p, j.vbar, um, pm, end)) {
      drift = std::max(drift, std::abs(fast_hamiltonian(p, j.vbar, s.u, s.p) - h0));
      u_lo = std::min(u_lo, s.u);
      u_hi = std::max(u_hi, s.u);
    }
  }
  CHECK(drift < 1e-8);
  // the orbit spans the jump
  CHECK(u_lo < j.u_minus + 0.05);
  CHECK(u_hi > j.u_plus - 0.05);
}

TEST_CASE("singular standing wave") {
  const auto p = ModelParameters::baseline();
  const auto w = singular_standing_wave(p);
  REQUIRE(w.x.size() == w.u.size());
  REQUIRE(std::is_sorted(w.x.begin(), w.x.end()));
  const std::size_t n = w.x.size();
  for (std::size_t i = 0; i < n; ++i) {
    REQUIRE(w.x[i] == -w.x[n - 1 - i]);
    REQUIRE(w.u[i] == w.u[n - 1 - i]);
    REQUIRE(w.v[i] == w.v[n - 1 - i]);
  }
  // jump from lower to upper branch exactly at vbar
  std::size_t jumps = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (w.x[i] == w.x[i - 1]) {
      ++jumps;
      CHECK(w.v[i] == w.jump.vbar);
    }
  CHECK(jumps == 2);
  CHECK(w.v_max < w.jump.folds.v_hi);
  CHECK(w.v_max > w.jump.vbar);
  CHECK(w.u.front() == Approx(w.u_star).epsilon(1e-4));
  CHECK(w.v.front() == Approx(w.v_star).epsilon(1e-4));
  CHECK(w.u_star == Approx(0.0523).margin(1e-4));
}

TEST_CASE("singular construction needs the background on the lower branch") {
  auto p = ModelParameters::baseline();
  p.c2 = 1.0;  // background above vbar
  CHECK_THROWS_AS(singular_standing_wave(p), AnalysisError);
}
