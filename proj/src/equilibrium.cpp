#include "cellwave/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <ostream>

#include "cellwave/error.hpp"

namespace cellwave {

namespace {

double horner(const std::array<double, 5>& c, double u) {
  return (((c[4] * u + c[3]) * u + c[2]) * u + c[1]) * u + c[0];
}

double horner_deriv(const std::array<double, 5>& c, double u) {
  return ((4.0 * c[4] * u + 3.0 * c[3]) * u + 2.0 * c[2]) * u + c[1];
}

double horner_deriv2(const std::array<double, 5>& c, double u) {
  return (12.0 * c[4] * u + 6.0 * c[3]) * u + 2.0 * c[2];
}

// Root of f in [lo, hi] given f(lo), f(hi) of opposite sign: bisection down to
// a tight bracket, then a couple of guarded Newton steps.
double bracketed_root(const std::function<double(double)>& f,
                      const std::function<double(double)>& df, double lo, double hi) {
  double flo = f(lo);
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 3; ++it) {
    const double d = df(x);
    if (d == 0.0) break;
    const double nx = x - f(x) / d;
    if (!(nx >= lo && nx <= hi)) break;
    x = nx;
  }
  return x;
}

void check_positive(const ModelParameters& p) {
  const double vals[] = {p.a1, p.a2, p.a3, p.a4, p.eps, p.c1, p.c2};
  for (double v : vals)
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError("model parameters must be positive");
  if (!(p.a5 >= 0.0) || !std::isfinite(p.a5)) throw ConfigError("a5 must be non-negative");
}

}  // namespace

std::string_view stability_name(Stability s) {
  switch (s) {
    case Stability::StableNode: return "stable-node";
    case Stability::StableFocus: return "stable-focus";
    case Stability::UnstableFocus: return "unstable-focus";
    case Stability::UnstableNode: return "unstable-node";
    case Stability::Saddle: return "saddle";
    case Stability::Marginal: return "marginal";
  }
  return "marginal";
}

std::array<double, 5> background_quartic(const ModelParameters& p) {
  const double r = p.a2 * p.c2 / p.c1;
  return {p.a5 * p.a4, -p.a1 * p.a4, p.a3 + p.a5 - r * p.a4, -p.a1, -r};
}

Matrix2 jacobian(const ModelParameters& p, double u, double v, JacobianForm form) {
  const double s = p.a4 + u * u;
  const double hill = 2.0 * p.a3 * p.a4 * u / (s * s);
  const double j11 = -p.a1 - p.a2 * v + (form == JacobianForm::Analytic ? hill : -hill);
  return {{{j11, -p.a2 * u}, {p.eps * p.c2, -p.eps * p.c1}}};
}

Eigenpair eigenvalues(const Matrix2& m) {
  const double tr = m[0][0] + m[1][1];
  const double det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
  const double half = 0.5 * tr;
  // discriminant as ((a-d)/2)^2 + bc avoids cancellation in tr^2/4 - det
  const double hd = 0.5 * (m[0][0] - m[1][1]);
  const double disc = hd * hd + m[0][1] * m[1][0];
  if (disc >= 0.0) {
    const double s = std::sqrt(disc);
    const double big = half + std::copysign(s, half);
    double small = big != 0.0 ? det / big : half - s;
    std::complex<double> l1 = big, l2 = small;
    if (l1.real() < l2.real()) std::swap(l1, l2);
    return {l1, l2};
  }
  const double w = std::sqrt(-disc);
  return {std::complex<double>(half, w), std::complex<double>(half, -w)};
}

Stability classify(const Eigenpair& ev, double tol) {
  const double r1 = ev[0].real(), r2 = ev[1].real();
  if (ev[0].imag() != 0.0) {
    if (std::abs(r1) <= tol) return Stability::Marginal;
    return r1 < 0.0 ? Stability::StableFocus : Stability::UnstableFocus;
  }
  if (std::abs(r1) <= tol || std::abs(r2) <= tol) return Stability::Marginal;
  if (r1 < 0.0 && r2 < 0.0) return Stability::StableNode;
  if (r1 > 0.0 && r2 > 0.0) return Stability::UnstableNode;
  return Stability::Saddle;
}

std::vector<BackgroundState> background_states(const ModelParameters& p) {
  check_positive(p);
  const auto c = background_quartic(p);
  auto q = [&](double u) { return horner(c, u); };
  auto dq = [&](double u) { return horner_deriv(c, u); };
  auto ddq = [&](double u) { return horner_deriv2(c, u); };

  std::vector<std::pair<double, int>> roots;
  if (p.a5 == 0.0) roots.emplace_back(0.0, 1);

  const double u_max = 10.0 * std::max(1.0, p.a3 / p.a1);
  const double u_min = 1e-12 * u_max;
  constexpr int kSamples = 20000;
  const double ratio = std::log(u_max / u_min) / kSamples;
  double prev_u = u_min, prev_q = q(u_min), prev_dq = dq(u_min);
  const double scale = std::max({std::abs(c[0]), std::abs(c[2]), 1.0});
  for (int k = 1; k <= kSamples; ++k) {
    const double u = u_min * std::exp(ratio * k);
    const double qu = q(u), dqu = dq(u);
    if (prev_q == 0.0) {
      roots.emplace_back(prev_u, 1);
    } else if ((qu < 0.0) != (prev_q < 0.0) && qu != 0.0) {
      roots.emplace_back(bracketed_root(q, dq, prev_u, u), 1);
    } else if ((dqu < 0.0) != (prev_dq < 0.0)) {
      // extremum without sign change: a double root if the quartic touches zero
      const double ue = bracketed_root(dq, ddq, prev_u, u);
      if (std::abs(q(ue)) <= 1e-12 * scale * std::max(1.0, ue * ue * ue * ue))
        roots.emplace_back(ue, 2);
    }
    prev_u = u;
    prev_q = qu;
    prev_dq = dqu;
  }

  std::vector<BackgroundState> out;
  for (const auto& [u, mult] : roots) {
    BackgroundState s;
    s.u_star = u;
    s.v_star = p.c2 * u / p.c1;
    s.multiplicity = mult;
    s.eigenvalues = eigenvalues(jacobian(p, s.u_star, s.v_star));
    s.classification = classify(s.eigenvalues);
    out.push_back(s);
  }
  std::sort(out.begin(), out.end(),
            [](const BackgroundState& a, const BackgroundState& b) { return a.u_star < b.u_star; });
  return out;
}

HopfScan hopf_scan(ModelParameters p, double c1_lo, double c1_hi, std::size_t steps, double tol,
                   JacobianForm form) {
  if (!(c1_lo > 0.0) || !(c1_hi >= c1_lo)) throw ConfigError("c1 range must satisfy 0 < lo <= hi");
  auto state_at = [&](double c1) {
    ModelParameters q = p;
    q.c1 = c1;
    auto states = background_states(q);
    for (auto& s : states) {
      s.eigenvalues = eigenvalues(jacobian(q, s.u_star, s.v_star, form));
      s.classification = classify(s.eigenvalues);
    }
    return states;
  };
  // signed indicators on the first state: discriminant and trace of J
  auto indicators = [&](double c1) -> std::optional<std::pair<double, double>> {
    ModelParameters q = p;
    q.c1 = c1;
    const auto states = background_states(q);
    if (states.empty()) return std::nullopt;
    const Matrix2 m = jacobian(q, states.front().u_star, states.front().v_star, form);
    const double hd = 0.5 * (m[0][0] - m[1][1]);
    return std::make_pair(hd * hd + m[0][1] * m[1][0], m[0][0] + m[1][1]);
  };

  HopfScan scan;
  const std::size_t n = steps == 0 ? 1 : steps + 1;
  std::vector<double> c1s;
  for (std::size_t i = 0; i < n; ++i)
    c1s.push_back(n == 1 ? c1_lo : c1_lo + (c1_hi - c1_lo) * static_cast<double>(i) / steps);
  for (double c1 : c1s) scan.rows.push_back({c1, state_at(c1)});

  auto refine = [&](double lo, double hi, bool use_trace) {
    auto value = [&](double c1) {
      const auto ind = indicators(c1);
      return use_trace ? ind->second : ind->first;
    };
    double flo = value(lo);
    while (hi - lo > tol) {
      const double mid = 0.5 * (lo + hi);
      const double fm = value(mid);
      if ((fm < 0.0) == (flo < 0.0)) {
        lo = mid;
        flo = fm;
      } else {
        hi = mid;
      }
    }
    return Bracket{lo, hi};
  };

  for (std::size_t i = 1; i < c1s.size(); ++i) {
    const auto a = indicators(c1s[i - 1]);
    const auto b = indicators(c1s[i]);
    if (!a || !b) continue;
    if (!scan.real_to_complex && (a->first >= 0.0) && (b->first < 0.0))
      scan.real_to_complex = refine(c1s[i - 1], c1s[i], false);
    if (!scan.hopf && (a->second < 0.0) != (b->second < 0.0) && (a->first < 0.0 || b->first < 0.0)) {
      const Bracket br = refine(c1s[i - 1], c1s[i], true);
      if (indicators(br.mid())->first < 0.0) scan.hopf = br;
    }
  }
  return scan;
}

std::vector<NullclineSample> nullclines(const ModelParameters& p, std::span<const double> u_grid) {
  std::vector<NullclineSample> out;
  out.reserve(u_grid.size());
  for (double u : u_grid) {
    if (!(u > 0.0)) throw ConfigError("nullcline grid must be strictly positive");
    const double vu = (-p.a1 * u + p.a3 * u * u / (p.a4 + u * u) + p.a5) / (p.a2 * u);
    out.push_back({u, vu, p.c2 * u / p.c1});
  }
  return out;
}

void write_scan_csv(std::ostream& os, const HopfScan& scan) {
  const auto old = os.precision(std::numeric_limits<double>::max_digits10);
  os << "c1,u_star,v_star,re_lambda1,im_lambda1,re_lambda2,im_lambda2,class\n";
  for (const auto& row : scan.rows)
    for (const auto& s : row.states)
      os << row.c1 << ',' << s.u_star << ',' << s.v_star << ',' << s.eigenvalues[0].real() << ','
         << s.eigenvalues[0].imag() << ',' << s.eigenvalues[1].real() << ','
         << s.eigenvalues[1].imag() << ',' << stability_name(s.classification) << '\n';
  os.precision(old);
}

}  // namespace cellwave
