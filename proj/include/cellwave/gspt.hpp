#pragma once

#include <array>
#include <optional>
#include <vector>

#include "cellwave/network.hpp"

namespace cellwave {

/// Real roots u of a1 u + a2 u v - a3 u^2/(a4 + u^2) - a5 = 0 at fixed v,
/// ascending. Three roots inside the fold interval, one outside.
struct ManifoldSlice {
  double v = 0.0;
  std::vector<double> roots;

  bool three_branches() const { return roots.size() == 3; }
  double lower() const { return roots.front(); }
  double upper() const { return roots.back(); }
};

ManifoldSlice manifold_branches(const ModelParameters& p, double v);

/// u-equation reaction term at (u, v); zero on the critical manifold.
double fast_nullcline(const ModelParameters& p, double u, double v);

/// v range with three branches: the lower and middle branch meet at v_lo, the
/// middle and upper at v_hi.
struct FoldInterval {
  double v_lo = 0.0, v_hi = 0.0;
  double u_lo = 0.0, u_hi = 0.0;  // u at each fold
};
std::optional<FoldInterval> fold_interval(const ModelParameters& p);

/// H(u, p) of the reduced fast system u' = p, p' = a1 u + a2 u vbar - a3 u^2/(a4+u^2) - a5.
double fast_hamiltonian(const ModelParameters& p, double vbar, double u, double pu);
double fast_hamiltonian_du(const ModelParameters& p, double vbar, double u);

struct OrbitSample {
  double xi, u, p;
};
/// Adaptive Dormand-Prince integration of the reduced fast system over
/// [0, xi_end] (xi_end may be negative), sampled at every accepted step.
std::vector<OrbitSample> fast_orbit(const ModelParameters& p, double vbar, double u0, double p0,
                                    double xi_end, double tol = 1e-12);

struct JumpValue {
  double vbar = 0.0;
  double u_minus = 0.0, u_plus = 0.0;  // lower and upper branch at vbar
  double delta_h = 0.0;                // H(u+,0) - H(u-,0) at vbar
  FoldInterval folds;
};

/// vbar with H(u-(vbar), 0) = H(u+(vbar), 0), by bisection over the fold
/// interval. Depends on a1..a5 only. Throws AnalysisError if there is no fold
/// or no sign change.
JumpValue jump_value(const ModelParameters& p);

struct SingularWave {
  JumpValue jump;
  double u_star = 0.0, v_star = 0.0;
  double q_jump = 0.0;   // v' when the lower segment reaches vbar
  double v_max = 0.0;    // peak of v on the upper branch
  double x_jump = 0.0;   // jumps at x = -x_jump and x = +x_jump
  std::vector<double> x, u, v;  // ascending x; the jump points appear twice
};

/// Singular standing wave from the reduced slow system v'' = eps (c1 v - c2 u(v))
/// on the lower branch (shot from the background saddle with offset
/// `offset`), a jump at vbar, the upper branch until v' = 0, mirrored about
/// x = 0. Sampled every `dx`. Throws AnalysisError when the background is not
/// on the lower branch or the upper excursion reaches the fold.
SingularWave singular_standing_wave(const ModelParameters& p, double dx = 0.01, double offset = 1e-8);

}  // namespace cellwave
