#include <catch_amalgamated.hpp>

#include <cmath>
#include <numeric>
#include <queue>

#include "cellwave/equilibrium.hpp"
#include "cellwave/error.hpp"
#include "cellwave/pattern.hpp"
#include "cellwave/rde.hpp"

using namespace cellwave;
using Catch::Approx;

namespace {

TraceMeta meta_for(double L, std::size_t n) {
  TraceMeta m;
  m.grid = Grid1D(L, n);
  m.species = {"u"};
  return m;
}

// u* plus Gaussian blobs {x0, t0, sx, st, amplitude}; periodic in x
SimulationTrace blob_trace(double L, std::size_t n, std::size_t rows, double dt, double u_star,
                           const std::vector<std::array<double, 5>>& blobs) {
  SimulationTrace tr(meta_for(L, n));
  const Grid1D g(L, n);
  std::vector<double> f(n);
  for (std::size_t i = 0; i < rows; ++i) {
    const double t = dt * static_cast<double>(i);
    for (std::size_t k = 0; k < n; ++k) {
      f[k] = u_star;
      for (const auto& b : blobs) {
        double dx = g.x(k) - b[0];
        dx -= L * std::round(dx / L);
        const double dtt = t - b[1];
        f[k] += b[4] * std::exp(-dx * dx / (b[2] * b[2]) - dtt * dtt / (b[3] * b[3]));
      }
    }
    tr.append(t, f);
  }
  return tr;
}

DetectorConfig raw_detector(double u_star) {
  DetectorConfig d;
  d.smooth_x = d.smooth_t = 0.0;
  d.u_star = u_star;
  return d;
}

}  // namespace

TEST_CASE("gaussian smoothing matches scipy with wrap in x and nearest in t") {
  const std::size_t R = 12, C = 10;
  std::vector<double> img(R * C);
  for (std::size_t i = 0; i < R; ++i)
    for (std::size_t k = 0; k < C; ++k) img[i * C + k] = std::sin(0.37 * i + 0.11 * k * k);
  // scipy.ndimage.gaussian_filter(img, sigma=(2,2), mode=('nearest','wrap'), truncate=4)
  const auto s = gaussian_smooth(img, R, C, 2.0, 2.0);
  CHECK(s[0] == Approx(0.3366469812605952).epsilon(1e-12));
  CHECK(s[5 * C + 3] == Approx(0.10783611930950163).epsilon(1e-12));
  CHECK(s[11 * C + 9] == Approx(-0.30634074812040313).epsilon(1e-12));
  CHECK(s[7 * C + 0] == Approx(0.013019184558580324).epsilon(1e-10));
  const auto c = gaussian_smooth(img, R, C, 0.0, 1.5);
  CHECK(c[3 * C + 4] == Approx(0.17653571150185984).epsilon(1e-12));
  CHECK(c[10 * C + 9] == Approx(-0.3419796797180999).epsilon(1e-12));
  CHECK(gaussian_smooth(img, R, C, 0.0, 0.0) == img);
  CHECK_THROWS_AS(gaussian_smooth(img, R, C + 1, 1.0, 1.0), ConfigError);
}

TEST_CASE("peak finder matches scipy find_peaks with prominence") {
  std::vector<double> x(200);
  for (std::size_t i = 0; i < x.size(); ++i)
    x[i] = std::sin(0.3 * i) + 0.5 * std::sin(1.7 * i) + 0.2 * std::cos(0.05 * i);
  for (std::size_t i = 50; i < 54; ++i) x[i] = 2.0;  // plateau reported at its middle
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  const auto peaks = find_peaks(x, 0.1 * (*hi - *lo));
  const std::vector<std::size_t> expect{1,   5,   8,   12,  16,  20,  23,  27,  30,  34,  38,  42,  45,
                                        51,  56,  60,  64,  67,  71,  75,  79,  86,  90,  93,  97,  101,
                                        105, 108, 112, 115, 119, 123, 127, 130, 134, 137, 141, 145, 149,
                                        152, 156, 160, 164, 167, 171, 175, 178, 182, 186, 190, 193, 197};
  REQUIRE(peaks.size() == expect.size());
  for (std::size_t j = 0; j < expect.size(); ++j) REQUIRE(peaks[j].index == expect[j]);
  CHECK(peaks[0].prominence == Approx(0.4729288799157414).epsilon(1e-12));
  CHECK(peaks[1].prominence == Approx(1.3905210272579285).epsilon(1e-12));
  CHECK(peaks[13].prominence == Approx(3.5254449569714605).epsilon(1e-12));
  CHECK(peaks.back().prominence == Approx(0.6090358134160972).epsilon(1e-12));
}

TEST_CASE("background-only trace has no events") {
  const auto tr = blob_trace(40.0, 200, 50, 0.1, 0.05, {});
  DetectorConfig d;
  d.u_star = 0.05;
  CHECK(detect_events(tr, d).empty());
}

TEST_CASE("a synthetic blob is recovered to within one pixel") {
  const double u_star = 0.05, A = 2.0, sx = 1.5, st = 1.2, h = 0.1, dt = 0.1;
  const auto tr = blob_trace(40.0, 400, 120, dt, u_star, {{{3.0, 6.0, sx, st, A}}});
  const auto ev = detect_events(tr, raw_detector(u_star));
  REQUIRE(ev.size() == 1);
  // support of A exp(-r^2) > 4 u*
  const double r = std::sqrt(std::log(A / (4.0 * u_star)));
  CHECK(std::abs(ev[0].width - 2.0 * sx * r) <= h);
  CHECK(std::abs(ev[0].length - 2.0 * st * r) <= dt);
  CHECK(std::abs(0.5 * (ev[0].x_left + ev[0].x_right) - 3.0) <= h);
  CHECK(ev[0].max_u == Approx(u_star + A).epsilon(1e-3));
  CHECK_FALSE(ev[0].truncated);
  CHECK(ev[0].width == Approx(ev[0].x_right - ev[0].x_left));
  CHECK(ev[0].length == Approx(ev[0].t_end - ev[0].t_start));

  DetectorConfig smooth;
  smooth.u_star = u_star;
  CHECK(detect_events(tr, smooth).size() == 1);
}

TEST_CASE("events across the periodic boundary stay whole") {
  const double u_star = 0.05;
  const auto inside = blob_trace(40.0, 400, 80, 0.1, u_star, {{{0.0, 4.0, 1.5, 1.0, 2.0}}});
  const auto wrapped = blob_trace(40.0, 400, 80, 0.1, u_star, {{{-20.0, 4.0, 1.5, 1.0, 2.0}}});
  const auto a = detect_events(inside, raw_detector(u_star));
  const auto b = detect_events(wrapped, raw_detector(u_star));
  REQUIRE(a.size() == 1);
  REQUIRE(b.size() == 1);
  CHECK(b[0].width == Approx(a[0].width));
  CHECK(b[0].length == Approx(a[0].length));
  CHECK(b[0].x_left > 0.0);    // starts on the right edge
  CHECK(b[0].x_right > 20.0);  // and runs past L/2
}

TEST_CASE("detector is translation equivariant and monotone in threshold") {
  const double u_star = 0.05;
  const auto tr = blob_trace(40.0, 400, 100, 0.1, u_star,
                             {{{-8.0, 3.0, 1.0, 1.0, 2.0}}, {{6.0, 5.0, 2.0, 1.5, 1.0}}, {{15.0, 7.0, 0.6, 0.8, 3.0}}});
  DetectorConfig d;
  d.u_star = u_star;
  const auto base = detect_events(tr, d);
  REQUIRE(base.size() == 3);

  const std::size_t shift = 137, n = tr.points();
  SimulationTrace moved(tr.meta());
  std::vector<double> f(n);
  for (std::size_t i = 0; i < tr.snapshot_count(); ++i) {
    const auto src = tr.field(i, 0);
    for (std::size_t k = 0; k < n; ++k) f[(k + shift) % n] = src[k];
    moved.append(tr.times()[i], f);
  }
  auto shifted = detect_events(moved, d);
  REQUIRE(shifted.size() == base.size());
  const double L = 40.0, dx = shift * 0.1;
  for (const auto& e : base) {
    double want = e.x_left + dx;
    want -= L * std::floor((want + L / 2) / L);
    const bool found = std::any_of(shifted.begin(), shifted.end(), [&](const EventBox& s) {
      return std::abs(s.x_left - want) < 1e-9 && s.width == Approx(e.width) && s.length == Approx(e.length);
    });
    CHECK(found);
  }

  std::size_t prev = std::numeric_limits<std::size_t>::max();
  for (double mult : {3.0, 5.0, 8.0, 20.0}) {
    d.threshold_mult = mult;
    std::size_t area = 0;
    for (const auto& e : detect_events(tr, d)) area += e.pixels;
    CHECK(area <= prev);
    prev = area;
  }
}

TEST_CASE("diagonal neighbours join and edge events are flagged") {
  SimulationTrace tr(meta_for(8.0, 8));
  std::vector<double> row(8, 0.0);
  for (int i = 0; i < 6; ++i) {
    std::fill(row.begin(), row.end(), 0.0);
    if (i == 2) row[3] = 1.0;
    if (i == 3) row[4] = 1.0;  // touches (2,3) only diagonally
    if (i == 5) row[0] = 1.0;
    tr.append(i, row);
  }
  const auto ev = detect_events(tr, raw_detector(0.1));
  REQUIRE(ev.size() == 2);
  CHECK(ev[0].pixels == 2);
  CHECK(ev[0].width == Approx(2.0));
  CHECK(ev[0].length == Approx(2.0));
  CHECK_FALSE(ev[0].truncated);
  CHECK(ev[1].truncated);

  SimulationTrace one(meta_for(8.0, 8));
  one.append(0.0, row);
  CHECK_THROWS_AS(detect_events(one, raw_detector(0.1)), ConfigError);
  CHECK_THROWS_AS(detect_events(tr, raw_detector(0.0)), ConfigError);
}

TEST_CASE("deterministic double pulse is a single event") {
  auto p = ModelParameters::baseline();
  const auto net = builtin_bhatt_model(p);
  const auto bg = background_states(p).front();
  const Grid1D g(40.0, 1024);  // at h = 0.078 the pair collapses near t = 9
  const std::vector<std::string> ic{"u_star + exp(-x^2)", "v_star + 2/cosh(5*x)^2"};
  const auto s0 = initial_state(net, g, ic, {{"u_star", bg.u_star}, {"v_star", bg.v_star}});
  const auto tr = simulate_rde(net, g, s0, 30.0, 1e-3, 100);
  DetectorConfig d;
  d.u_star = resolve_u_star(net);
  const auto ev = detect_events(tr, d);
  REQUIRE(ev.size() == 1);
  CHECK(ev[0].truncated);
  CHECK(ev[0].t_end >= 30.0);

  // independent 4-neighbour-plus-diagonal flood fill on the same binary image
  const std::size_t rows = tr.snapshot_count(), cols = g.size();
  std::vector<double> raw;
  for (std::size_t i = 0; i < rows; ++i) raw.insert(raw.end(), tr.field(i, 0).begin(), tr.field(i, 0).end());
  const auto sm = gaussian_smooth(raw, rows, cols, 2.0, 2.0);
  std::vector<int> seen(rows * cols, 0);
  int components = 0;
  for (std::size_t start = 0; start < sm.size(); ++start) {
    if (seen[start] || sm[start] <= 5.0 * d.u_star) continue;
    ++components;
    std::queue<std::size_t> q;
    q.push(start);
    seen[start] = 1;
    while (!q.empty()) {
      const std::size_t c = q.front();
      q.pop();
      const long i = static_cast<long>(c / cols), k = static_cast<long>(c % cols);
      for (long di = -1; di <= 1; ++di)
        for (long dk = -1; dk <= 1; ++dk) {
          const long ii = i + di;
          if (ii < 0 || ii >= static_cast<long>(rows)) continue;
          const long kk = (k + dk + static_cast<long>(cols)) % static_cast<long>(cols);
          const std::size_t nb = ii * cols + kk;
          if (!seen[nb] && sm[nb] > 5.0 * d.u_star) {
            seen[nb] = 1;
            q.push(nb);
          }
        }
    }
  }
  CHECK(components == 1);
}

TEST_CASE("unresolvable background state is an error") {
  // three positive background states
  ModelParameters p;
  p.a1 = 73.56133149127409;
  p.a2 = 0.6797015212816798;
  p.a3 = 22.38131951209512;
  p.a4 = 0.01672968871096472;
  p.a5 = 0.34861737538686954;
  p.c1 = 1.0;
  p.c2 = 2.306633854334634 / p.a2;
  REQUIRE(background_states(p).size() == 3);
  CHECK_THROWS_AS(resolve_u_star(builtin_bhatt_model(p)), AnalysisError);
}

TEST_CASE("histograms use fixed edges from zero") {
  const std::vector<double> v{0.0, 0.1, 0.25, 0.3, 0.74, 0.75};
  const auto h = histogram(v, 0.25);
  CHECK(h.origin == 0.0);
  CHECK(h.counts == std::vector<std::size_t>{2, 2, 1, 1});
  CHECK_THROWS_AS(histogram(std::vector<double>{-1.0}, 0.25), ConfigError);
  CHECK_THROWS_AS(histogram(v, 0.0), ConfigError);
}

TEST_CASE("pooled event statistics") {
  std::vector<EventBox> ev(3);
  ev[0].width = 1.0;
  ev[1].width = 2.0;
  ev[2].width = 3.0;
  ev[2].truncated = true;
  for (auto& e : ev) {
    e.length = 2.0;
    e.max_u = 1.0;
  }
  const auto s = summarise_events(ev, 2, 0.04);
  CHECK(s.mean_count == 1.5);
  CHECK(s.mean_count_complete == 1.0);
  CHECK(s.width_mean == Approx(2.0));
  CHECK(s.width_std == Approx(1.0));
  CHECK(s.length_std == 0.0);
}

TEST_CASE("period of a sinusoidal spatial mean") {
  SimulationTrace tr(meta_for(10.0, 16));
  std::vector<double> f(16);
  for (int i = 0; i <= 1000; ++i) {
    const double t = 0.05 * i;
    for (std::size_t k = 0; k < f.size(); ++k) f[k] = 1.0 + std::sin(2.0 * M_PI * t / 8.0) + 0.01 * k;
    tr.append(t, f);
  }
  const auto p = estimate_period(tr);
  CHECK(p.mean == Approx(8.0).margin(0.05));
  CHECK(p.n_peaks == 6);
  PeriodOptions late;
  late.t_min = 40.0;
  CHECK_THROWS_AS(estimate_period(tr, late), AnalysisError);
}
