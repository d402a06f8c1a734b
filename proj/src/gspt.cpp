#include "cellwave/gspt.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/numeric/odeint.hpp>

#include "cellwave/equilibrium.hpp"
#include "cellwave/error.hpp"

namespace cellwave {

namespace odeint = boost::numeric::odeint;

namespace {

using Slow = std::array<double, 2>;

double fast_nullcline_du(const ModelParameters& p, double u, double v) {
  const double s = p.a4 + u * u;
  return p.a1 + p.a2 * v - 2.0 * p.a3 * p.a4 * u / (s * s);
}

double polish(const ModelParameters& p, double u, double v) {
  for (int it = 0; it < 4; ++it) {
    const double d = fast_nullcline_du(p, u, v);
    if (d == 0.0) break;
    const double next = u - fast_nullcline(p, u, v) / d;
    if (!(next > 0.0) || !std::isfinite(next)) break;
    if (std::abs(fast_nullcline(p, next, v)) > std::abs(fast_nullcline(p, u, v))) break;
    u = next;
  }
  return u;
}

// dv/du along the u-nullcline, up to the positive factor 1/a2
double nullcline_slope(const ModelParameters& p, double u) {
  const double s = p.a4 + u * u;
  return p.a3 * (p.a4 - u * u) / (s * s) - p.a5 / (u * u);
}

double nullcline_v(const ModelParameters& p, double u) {
  return (p.a3 * u / (p.a4 + u * u) + p.a5 / u - p.a1) / p.a2;
}

template <class F>
double bisect(F&& f, double lo, double hi, double width) {
  double flo = f(lo);
  for (int it = 0; it < 300 && hi - lo > width; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double fast_nullcline(const ModelParameters& p, double u, double v) {
  return p.a1 * u + p.a2 * u * v - p.a3 * u * u / (p.a4 + u * u) - p.a5;
}

ManifoldSlice manifold_branches(const ModelParameters& p, double v) {
  if (!(v >= 0.0)) throw ConfigError("manifold slice needs v >= 0");
  // A u^3 + B u^2 + C u + D = (a4 + u^2) * fast_nullcline
  const double A = p.a1 + p.a2 * v, B = -(p.a3 + p.a5), C = A * p.a4, D = -p.a5 * p.a4;
  const double shift = -B / (3.0 * A);
  const double pp = (3.0 * A * C - B * B) / (3.0 * A * A);
  const double qq = (2.0 * B * B * B - 9.0 * A * B * C + 27.0 * A * A * D) / (27.0 * A * A * A);
  const double disc = qq * qq / 4.0 + pp * pp * pp / 27.0;

  ManifoldSlice slice;
  slice.v = v;
  if (disc < 0.0) {
    const double r = 2.0 * std::sqrt(-pp / 3.0);
    const double arg = std::clamp(3.0 * qq / (2.0 * pp) * std::sqrt(-3.0 / pp), -1.0, 1.0);
    const double phi = std::acos(arg) / 3.0;
    for (int k = 0; k < 3; ++k) slice.roots.push_back(polish(p, shift + r * std::cos(phi - 2.0 * std::numbers::pi * k / 3.0), v));
  } else {
    const double s = std::sqrt(disc);
    slice.roots.push_back(polish(p, shift + std::cbrt(-qq / 2.0 + s) + std::cbrt(-qq / 2.0 - s), v));
  }
  std::sort(slice.roots.begin(), slice.roots.end());
  return slice;
}

std::optional<FoldInterval> fold_interval(const ModelParameters& p) {
  const double u_lo = 1e-8, u_hi = 1e4;
  constexpr int kSamples = 20000;
  std::vector<double> crit;
  double prev_u = u_lo, prev = nullcline_slope(p, u_lo);
  for (int k = 1; k <= kSamples; ++k) {
    const double u = u_lo * std::pow(u_hi / u_lo, static_cast<double>(k) / kSamples);
    const double g = nullcline_slope(p, u);
    if ((g < 0.0) != (prev < 0.0))
      crit.push_back(bisect([&](double x) { return nullcline_slope(p, x); }, prev_u, u, 1e-15 * u));
    prev_u = u;
    prev = g;
  }
  if (crit.size() != 2) return std::nullopt;
  FoldInterval f;
  f.u_lo = crit[0];
  f.u_hi = crit[1];
  f.v_lo = nullcline_v(p, crit[0]);
  f.v_hi = nullcline_v(p, crit[1]);
  return f;
}

double fast_hamiltonian(const ModelParameters& p, double vbar, double u, double pu) {
  const double r = std::sqrt(p.a4);
  return 0.5 * pu * pu - 0.5 * (p.a1 + p.a2 * vbar) * u * u + p.a3 * (u - r * std::atan(u / r)) + p.a5 * u;
}

double fast_hamiltonian_du(const ModelParameters& p, double vbar, double u) {
  return -fast_nullcline(p, u, vbar);
}

std::vector<OrbitSample> fast_orbit(const ModelParameters& p, double vbar, double u0, double p0,
                                    double xi_end, double tol) {
  using State = std::array<double, 2>;
  auto rhs = [&](const State& x, State& dx, double) {
    dx[0] = x[1];
    dx[1] = fast_nullcline(p, x[0], vbar);
  };
  std::vector<OrbitSample> out;
  State x{u0, p0};
  odeint::integrate_adaptive(odeint::make_controlled(tol, tol, odeint::runge_kutta_dopri5<State>()), rhs,
                             x, 0.0, xi_end, xi_end > 0 ? 1e-3 : -1e-3,
                             [&](const State& s, double t) { out.push_back({t, s[0], s[1]}); });
  return out;
}

JumpValue jump_value(const ModelParameters& p) {
  const auto folds = fold_interval(p);
  if (!folds) throw AnalysisError("critical manifold has no fold: no three-branch interval");
  auto delta = [&](double v) {
    const auto s = manifold_branches(p, v);
    if (!s.three_branches()) throw AnalysisError("lost a branch inside the fold interval");
    return fast_hamiltonian(p, v, s.upper(), 0.0) - fast_hamiltonian(p, v, s.lower(), 0.0);
  };
  const double width = folds->v_hi - folds->v_lo;
  const double lo = folds->v_lo + 1e-9 * width, hi = folds->v_hi - 1e-9 * width;
  const double dlo = delta(lo), dhi = delta(hi);
  if ((dlo < 0.0) == (dhi < 0.0))
    throw AnalysisError("H(u+,0) - H(u-,0) has no sign change over the fold interval");
  JumpValue j;
  j.folds = *folds;
  j.vbar = bisect(delta, lo, hi, 1e-13);
  const auto s = manifold_branches(p, j.vbar);
  j.u_minus = s.lower();
  j.u_plus = s.upper();
  j.delta_h = delta(j.vbar);
  return j;
}

SingularWave singular_standing_wave(const ModelParameters& p, double dx, double offset) {
  if (!(dx > 0.0)) throw ConfigError("sample spacing must be positive");
  SingularWave w;
  w.jump = jump_value(p);
  const auto& folds = w.jump.folds;
  const auto states = background_states(p);
  if (states.empty()) throw AnalysisError("no background state");
  w.u_star = states.front().u_star;
  w.v_star = states.front().v_star;
  if (!(w.v_star > folds.v_lo) || !(w.v_star < w.jump.vbar) ||
      std::abs(manifold_branches(p, w.v_star).lower() - w.u_star) > 1e-8 * std::max(1.0, w.u_star))
    throw AnalysisError("background state is not on the lower branch below the jump value");

  auto lower = [&](double v) {
    if (v < folds.v_lo) throw AnalysisError("lower branch left through its fold");
    return manifold_branches(p, v).lower();
  };
  auto upper = [&](double v) {
    if (v >= folds.v_hi)
      throw AnalysisError("singular construction fails: v on the upper branch reaches the fold at v=" +
                          std::to_string(folds.v_hi));
    return manifold_branches(p, v).upper();
  };

  // saddle eigenvalue of the lower slow system at v*
  const double du_dv = -p.a2 * w.u_star / fast_nullcline_du(p, w.u_star, w.v_star);
  const double lambda = std::sqrt(p.eps * (p.c1 - p.c2 * du_dv));

  std::vector<double> xs, vs;
  std::vector<int> branch;  // 0 lower, 1 upper
  auto run = [&](auto&& ufun, Slow x, double t0, auto&& stop, int tag) {
    auto rhs = [&](const Slow& s, Slow& d, double) {
      d[0] = s[1];
      d[1] = p.eps * (p.c1 * s[0] - p.c2 * ufun(s[0]));
    };
    auto st = odeint::make_dense_output(1e-12, 1e-12, odeint::runge_kutta_dopri5<Slow>());
    st.initialize(x, t0, 1e-3);
    double next_sample = std::ceil(t0 / dx) * dx;
    for (int guard = 0; guard < 10000000; ++guard) {
      const auto [ta, tb] = st.do_step(rhs);
      Slow cur = st.current_state();
      const bool done = stop(cur);
      double t_end = tb;
      if (done) {
        double lo = ta, hi = tb;
        Slow mid;
        for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, hi); ++it) {
          const double m = 0.5 * (lo + hi);
          st.calc_state(m, mid);
          (stop(mid) ? hi : lo) = m;
        }
        t_end = hi;
      }
      for (; next_sample < t_end; next_sample += dx) {
        Slow s;
        st.calc_state(next_sample, s);
        xs.push_back(next_sample);
        vs.push_back(s[0]);
        branch.push_back(tag);
      }
      if (done) {
        Slow s;
        st.calc_state(t_end, s);
        return std::make_pair(t_end, s);
      }
    }
    throw AnalysisError("slow segment did not terminate");
  };

  const auto [x1, at_jump] = run(lower, Slow{w.v_star + offset, lambda * offset}, 0.0,
                                 [&](const Slow& s) { return s[0] >= w.jump.vbar; }, 0);
  w.q_jump = at_jump[1];
  // jump points, then the upper segment from (vbar, q_jump) to v' = 0
  const std::size_t jump_index = xs.size();
  const auto [x2, at_peak] = run(upper, Slow{w.jump.vbar, w.q_jump}, x1,
                                 [&](const Slow& s) { return s[1] <= 0.0; }, 1);
  w.v_max = at_peak[0];
  w.x_jump = x2 - x1;

  std::vector<double> lx, lu, lv;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i == jump_index) {
      lx.insert(lx.end(), {x1 - x2, x1 - x2});
      lu.insert(lu.end(), {w.jump.u_minus, w.jump.u_plus});
      lv.insert(lv.end(), {w.jump.vbar, w.jump.vbar});
    }
    lx.push_back(xs[i] - x2);
    lu.push_back(branch[i] == 0 ? lower(vs[i]) : upper(vs[i]));
    lv.push_back(vs[i]);
  }
  if (jump_index == xs.size()) {
    lx.insert(lx.end(), {x1 - x2, x1 - x2});
    lu.insert(lu.end(), {w.jump.u_minus, w.jump.u_plus});
    lv.insert(lv.end(), {w.jump.vbar, w.jump.vbar});
  }
  while (!lx.empty() && lx.back() >= 0.0) {
    lx.pop_back();
    lu.pop_back();
    lv.pop_back();
  }
  w.x = lx;
  w.u = lu;
  w.v = lv;
  w.x.push_back(0.0);
  w.u.push_back(upper(w.v_max));
  w.v.push_back(w.v_max);
  for (std::size_t i = lx.size(); i-- > 0;) {
    w.x.push_back(-lx[i]);
    w.u.push_back(lu[i]);
    w.v.push_back(lv[i]);
  }
  return w;
}

}  // namespace cellwave
