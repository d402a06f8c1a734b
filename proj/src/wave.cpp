#include "cellwave/wave.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "cellwave/equilibrium.hpp"
#include "cellwave/error.hpp"
#include "cellwave/rde.hpp"

namespace cellwave {

namespace {

struct Kinetics {
  double f, fu, fv, g, gu, gv;
};

Kinetics kinetics(const ModelParameters& p, double u, double v) {
  const double s = p.a4 + u * u;
  Kinetics k;
  k.f = -(p.a1 + p.a2 * v) * u + p.a3 * u * u / s + p.a5;
  k.fu = -(p.a1 + p.a2 * v) + 2.0 * p.a3 * p.a4 * u / (s * s);
  k.fv = -p.a2 * u;
  k.g = p.eps * (-p.c1 * v + p.c2 * u);
  k.gu = p.eps * p.c2;
  k.gv = -p.eps * p.c1;
  return k;
}

double max_norm(std::span<const double> r) {
  double m = 0.0;
  for (double x : r) m = std::max(m, std::abs(x));
  return m;
}

// centred first difference, periodic
std::vector<double> derivative(std::span<const double> a, double h) {
  const std::size_t n = a.size();
  std::vector<double> d(n);
  for (std::size_t k = 0; k < n; ++k) d[k] = (a[(k + 1) % n] - a[(k + n - 1) % n]) / (2.0 * h);
  return d;
}

enum class Border { None, Speed, Pin };

WaveProfile newton(const ModelParameters& p, const Grid1D& grid, const FieldState& guess, double c0,
                   bool free_speed, const WaveOptions& opt) {
  const std::size_t n = grid.size();
  if (guess.species != 2 || guess.n != n) throw ConfigError("wave guess must hold u and v on the solver grid");
  const double h = grid.h();
  std::vector<double> u(guess.field(0).begin(), guess.field(0).end());
  std::vector<double> v(guess.field(1).begin(), guess.field(1).end());

  // phase direction from the guess
  auto du = derivative(u, h), dv = derivative(v, h);
  double psi_norm = 0.0;
  for (std::size_t k = 0; k < n; ++k) psi_norm += du[k] * du[k] + dv[k] * dv[k];
  psi_norm = std::sqrt(psi_norm);
  const bool homogeneous = psi_norm < 1e-10;
  const Border border = homogeneous ? Border::None : (free_speed ? Border::Speed : Border::Pin);
  std::vector<double> psi(2 * n, 0.0);
  if (!homogeneous)
    for (std::size_t k = 0; k < n; ++k) {
      psi[k] = du[k] / psi_norm;
      psi[n + k] = dv[k] / psi_norm;
    }
  const std::vector<double> u0 = u, v0 = v;

  double c = free_speed ? c0 : 0.0;
  double multiplier = 0.0;
  const std::size_t dim = 2 * n + (border == Border::None ? 0 : 1);

  auto full_residual = [&](const std::vector<double>& uu, const std::vector<double>& vv, double cc, double lam) {
    auto r = wave_residual(p, grid, uu, vv, cc);
    if (border == Border::Pin)
      for (std::size_t i = 0; i < 2 * n; ++i) r[i] += lam * psi[i];
    if (border != Border::None) {
      double ph = 0.0;
      for (std::size_t k = 0; k < n; ++k) ph += psi[k] * (uu[k] - u0[k]) + psi[n + k] * (vv[k] - v0[k]);
      r.push_back(ph);
    }
    return r;
  };
  auto norm2 = [](const std::vector<double>& r) {
    double s = 0.0;
    for (double x : r) s += x * x;
    return std::sqrt(s);
  };

  WaveProfile out;
  out.grid = grid;
  const double Du = p.Du, Dv = p.Dv, h2 = h * h;
  std::vector<double> r = full_residual(u, v, c, multiplier);
  int it = 0;
  for (; it < opt.max_iterations; ++it) {
    if (max_norm(r) < opt.tolerance) break;
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(10 * n + 4 * n + 1);
    const auto dU = derivative(u, h), dV = derivative(v, h);
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t km = (k + n - 1) % n, kp = (k + 1) % n;
      const Kinetics kin = kinetics(p, u[k], v[k]);
      const auto ku = static_cast<int>(k), kv = static_cast<int>(n + k);
      trip.emplace_back(ku, ku, -2.0 * Du / h2 + kin.fu);
      trip.emplace_back(ku, static_cast<int>(km), Du / h2 - c / (2.0 * h));
      trip.emplace_back(ku, static_cast<int>(kp), Du / h2 + c / (2.0 * h));
      trip.emplace_back(ku, kv, kin.fv);
      trip.emplace_back(kv, kv, -2.0 * Dv / h2 + kin.gv);
      trip.emplace_back(kv, static_cast<int>(n + km), Dv / h2 - c / (2.0 * h));
      trip.emplace_back(kv, static_cast<int>(n + kp), Dv / h2 + c / (2.0 * h));
      trip.emplace_back(kv, ku, kin.gu);
      if (border != Border::None) {
        const int col = static_cast<int>(2 * n);
        trip.emplace_back(ku, col, border == Border::Speed ? dU[k] : psi[k]);
        trip.emplace_back(kv, col, border == Border::Speed ? dV[k] : psi[n + k]);
        trip.emplace_back(col, ku, psi[k]);
        trip.emplace_back(col, kv, psi[n + k]);
      }
    }
    Eigen::SparseMatrix<double> J(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    J.setFromTriplets(trip.begin(), trip.end());
    J.makeCompressed();
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(J);
    if (lu.info() != Eigen::Success)
      throw AnalysisError("wave Newton: singular Jacobian (check the pinning row " + std::to_string(2 * n) +
                          " against the guess)");
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(dim));
    for (std::size_t i = 0; i < dim; ++i) rhs[static_cast<Eigen::Index>(i)] = -r[i];
    const Eigen::VectorXd step = lu.solve(rhs);
    if (!step.allFinite()) throw AnalysisError("wave Newton: non-finite step (singular Jacobian at the pinning row)");

    const double r0 = norm2(r);
    double lambda = 1.0;
    std::vector<double> un(n), vn(n), rn;
    double cn = c, mn = multiplier;
    for (int halving = 0;; ++halving) {
      for (std::size_t k = 0; k < n; ++k) {
        un[k] = u[k] + lambda * step[static_cast<Eigen::Index>(k)];
        vn[k] = v[k] + lambda * step[static_cast<Eigen::Index>(n + k)];
      }
      if (border == Border::Speed) cn = c + lambda * step[static_cast<Eigen::Index>(2 * n)];
      if (border == Border::Pin) mn = multiplier + lambda * step[static_cast<Eigen::Index>(2 * n)];
      rn = full_residual(un, vn, cn, mn);
      if (norm2(rn) < r0 || halving >= opt.max_halvings) break;
      lambda *= 0.5;
    }
    u.swap(un);
    v.swap(vn);
    c = cn;
    multiplier = mn;
    r.swap(rn);
  }

  const auto pure = wave_residual(p, grid, u, v, c);
  out.u = std::move(u);
  out.v = std::move(v);
  out.c = c;
  out.residual = max_norm(pure);
  out.iterations = it;
  out.converged = max_norm(r) < opt.tolerance && out.residual < opt.tolerance;
  const auto [umin, umax] = std::minmax_element(out.u.begin(), out.u.end());
  const auto [vmin, vmax] = std::minmax_element(out.v.begin(), out.v.end());
  out.trivial = (*umax - *umin) < 1e-6 && (*vmax - *vmin) < 1e-6;
  if (!out.converged)
    throw AnalysisError("wave Newton did not converge after " + std::to_string(it) +
                        " iterations; residual " + std::to_string(out.residual));
  return out;
}

}  // namespace

std::vector<double> wave_residual(const ModelParameters& p, const Grid1D& grid, std::span<const double> u,
                                  std::span<const double> v, double c) {
  const std::size_t n = grid.size();
  const double h = grid.h(), h2 = h * h;
  std::vector<double> r(2 * n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t km = (k + n - 1) % n, kp = (k + 1) % n;
    const Kinetics kin = kinetics(p, u[k], v[k]);
    r[k] = p.Du * (u[km] - 2.0 * u[k] + u[kp]) / h2 + c * (u[kp] - u[km]) / (2.0 * h) + kin.f;
    r[n + k] = p.Dv * (v[km] - 2.0 * v[k] + v[kp]) / h2 + c * (v[kp] - v[km]) / (2.0 * h) + kin.g;
  }
  return r;
}

std::vector<double> wave_jacobian_dense(const ModelParameters& p, const Grid1D& grid, std::span<const double> u,
                                        std::span<const double> v, double c) {
  const std::size_t n = grid.size(), cols = 2 * n + 1;
  const double h = grid.h(), h2 = h * h;
  std::vector<double> J(2 * n * cols, 0.0);
  const auto dU = derivative(u, h), dV = derivative(v, h);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t km = (k + n - 1) % n, kp = (k + 1) % n;
    const Kinetics kin = kinetics(p, u[k], v[k]);
    double* ru = J.data() + k * cols;
    double* rv = J.data() + (n + k) * cols;
    ru[k] += -2.0 * p.Du / h2 + kin.fu;
    ru[km] += p.Du / h2 - c / (2.0 * h);
    ru[kp] += p.Du / h2 + c / (2.0 * h);
    ru[n + k] += kin.fv;
    ru[2 * n] = dU[k];
    rv[n + k] += -2.0 * p.Dv / h2 + kin.gv;
    rv[n + km] += p.Dv / h2 - c / (2.0 * h);
    rv[n + kp] += p.Dv / h2 + c / (2.0 * h);
    rv[k] += kin.gu;
    rv[2 * n] = dV[k];
  }
  return J;
}

WaveProfile solve_standing_wave(const ModelParameters& p, const Grid1D& grid, const FieldState& guess,
                                const WaveOptions& opt) {
  return newton(p, grid, guess, 0.0, false, opt);
}

WaveProfile solve_travelling_wave(const ModelParameters& p, const Grid1D& grid, const FieldState& guess,
                                  double c_guess, const WaveOptions& opt) {
  return newton(p, grid, guess, c_guess, true, opt);
}

FieldState resample(const FieldState& s, const Grid1D& from, const Grid1D& to) {
  if (std::abs(from.length() - to.length()) > 1e-12 * from.length())
    throw ConfigError("resample needs grids of equal length");
  const std::size_t n = from.size();
  FieldState out(s.species, to.size(), s.time);
  for (std::size_t k = 0; k < to.size(); ++k) {
    const double pos = (to.x(k) - from.x(0)) / from.h();
    const double fl = std::floor(pos);
    const double t = pos - fl;
    const std::size_t i0 = static_cast<std::size_t>(fl) % n, i1 = (i0 + 1) % n;
    for (std::size_t sp = 0; sp < s.species; ++sp)
      out.field(sp)[k] = (1.0 - t) * s.field(sp)[i0] + t * s.field(sp)[i1];
  }
  return out;
}

FieldState reflect(const FieldState& s) {
  // x_k = -L/2 + k h, so -x_k is cell (n - k) mod n
  FieldState out = s;
  for (std::size_t sp = 0; sp < s.species; ++sp)
    for (std::size_t k = 0; k < s.n; ++k) out.field(sp)[(s.n - k) % s.n] = s.field(sp)[k];
  return out;
}

FieldState guess_from_singular(const SingularWave& w, const Grid1D& grid) {
  FieldState s(2, grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double x = grid.x(k);
    double uu = w.u_star, vv = w.v_star;
    if (x > w.x.front() && x < w.x.back()) {
      const auto it = std::upper_bound(w.x.begin(), w.x.end(), x);
      const std::size_t j = static_cast<std::size_t>(it - w.x.begin());
      const double t = (x - w.x[j - 1]) / (w.x[j] - w.x[j - 1]);
      uu = w.u[j - 1] + t * (w.u[j] - w.u[j - 1]);
      vv = w.v[j - 1] + t * (w.v[j] - w.v[j - 1]);
    }
    s.values[k] = uu;
    s.values[grid.size() + k] = vv;
  }
  return s;
}

FieldState centre_on_max(const FieldState& s, const Grid1D& grid) {
  const auto f = s.field(0);
  const std::size_t imax = static_cast<std::size_t>(std::max_element(f.begin(), f.end()) - f.begin());
  const std::size_t n = grid.size();
  const std::size_t centre = n / 2;  // x = 0 for even n
  FieldState out = s;
  for (std::size_t sp = 0; sp < s.species; ++sp)
    for (std::size_t k = 0; k < n; ++k) out.field(sp)[(k + centre + n - imax) % n] = s.field(sp)[k];
  return out;
}

FieldState travelling_pulse_seed(const ModelParameters& p, const Grid1D& grid, double T, double dt) {
  const auto states = background_states(p);
  if (states.empty()) throw AnalysisError("no background state");
  const double us = states.front().u_star, vs = states.front().v_star;
  const ReactionNetwork net = builtin_bhatt_model(p);
  FieldState s(2, grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double x = grid.x(k);
    s.values[k] = us + std::exp(-x * x);
    s.values[grid.size() + k] = vs + 2.0 / std::pow(std::cosh(5.0 * x), 2);
  }
  const auto steps = static_cast<std::uint64_t>(std::llround(T / dt));
  s = simulate_rde(net, grid, s, T, dt, std::max<std::uint64_t>(steps, 1)).state(1);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (grid.x(k) >= 0.0) continue;
    s.values[k] = us;
    s.values[grid.size() + k] = vs;
  }
  return centre_on_max(s, grid);
}

double transition_v(const WaveProfile& w) {
  const std::size_t n = w.u.size();
  const std::size_t imax = static_cast<std::size_t>(std::max_element(w.u.begin(), w.u.end()) - w.u.begin());
  // walk left from the maximum over half the domain for the steepest rise
  double best = -1.0;
  std::size_t at = imax;
  for (std::size_t step = 1; step < n / 2; ++step) {
    const std::size_t k = (imax + n - step) % n, kp = (k + 1) % n;
    const double rise = w.u[kp] - w.u[k];
    if (rise > best) {
      best = rise;
      at = k;
    }
  }
  return 0.5 * (w.v[at] + w.v[(at + 1) % n]);
}

SpeedFit measure_speed(const SimulationTrace& trace, double t_lo, double t_hi,
                       std::optional<std::pair<double, double>> x_window, std::size_t species) {
  const Grid1D& g = trace.meta().grid;
  const std::size_t n = g.size();
  const double L = g.length();
  std::vector<double> ts, xs;
  double prev = 0.0;
  for (std::size_t i = 0; i < trace.snapshot_count(); ++i) {
    const double t = trace.times()[i];
    if (t < t_lo || t > t_hi) continue;
    const auto f = trace.field(i, species);
    std::size_t best = n;
    for (std::size_t k = 0; k < n; ++k) {
      const double x = g.x(k);
      if (x_window && (x < x_window->first || x >= x_window->second)) continue;
      if (best == n || f[k] > f[best]) best = k;
    }
    if (best == n) throw ConfigError("speed window contains no grid points");
    const auto [mn, mx] = std::minmax_element(f.begin(), f.end());
    if (*mx - *mn <= 1e-9 * std::max(1.0, std::abs(*mx)))
      throw AnalysisError("flat field at t=" + std::to_string(t) + ": no maximum to track");
    const double fm = f[(best + n - 1) % n], f0 = f[best], fp = f[(best + 1) % n];
    const double denom = fm - 2.0 * f0 + fp;
    const double offset = denom < 0.0 ? 0.5 * (fm - fp) / denom : 0.0;
    double x = g.x(best) + offset * g.h();
    if (!xs.empty()) {
      while (x - prev > 0.5 * L) x -= L;
      while (prev - x > 0.5 * L) x += L;
    }
    prev = x;
    ts.push_back(t);
    xs.push_back(x);
  }
  if (ts.size() < 3) throw AnalysisError("fewer than three snapshots in the speed window");
  const double m = static_cast<double>(ts.size());
  double st = 0, sx = 0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    st += ts[i];
    sx += xs[i];
  }
  const double tm = st / m, xm = sx / m;
  double stt = 0, stx = 0, sxx = 0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    stt += (ts[i] - tm) * (ts[i] - tm);
    stx += (ts[i] - tm) * (xs[i] - xm);
    sxx += (xs[i] - xm) * (xs[i] - xm);
  }
  SpeedFit fit;
  fit.speed = stx / stt;
  fit.r2 = sxx > 0.0 ? stx * stx / (stt * sxx) : 1.0;
  fit.samples = ts.size();
  return fit;
}

void write_profile_csv(std::ostream& os, const WaveProfile& w) {
  const auto old = os.precision(std::numeric_limits<double>::max_digits10);
  os << "xi,phi_u,phi_v\n";
  for (std::size_t k = 0; k < w.u.size(); ++k) os << w.grid.x(k) << ',' << w.u[k] << ',' << w.v[k] << '\n';
  os.precision(old);
}

}  // namespace cellwave
