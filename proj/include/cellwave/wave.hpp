#pragma once

#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

#include "cellwave/grid.hpp"
#include "cellwave/gspt.hpp"
#include "cellwave/network.hpp"
#include "cellwave/trace.hpp"

namespace cellwave {

/// Discrete solution of
///   0 = Du u'' + c u' + f(u, v),  0 = Dv v'' + c v' + g(u, v)
/// on a periodic grid in the co-moving coordinate xi = x - c t.
struct WaveProfile {
  Grid1D grid;
  std::vector<double> u, v;
  double c = 0.0;
  double residual = 0.0;  // max norm of the discrete equations
  int iterations = 0;
  bool converged = false;
  bool trivial = false;   // homogeneous solution
};

struct WaveOptions {
  int max_iterations = 60;
  double tolerance = 1e-9;
  int max_halvings = 8;
};

/// Residual of both equations, species-major (2n values).
std::vector<double> wave_residual(const ModelParameters& p, const Grid1D& grid, std::span<const double> u,
                                  std::span<const double> v, double c);

/// Analytic Jacobian of wave_residual with respect to (u, v, c), dense and
/// row-major with 2n+1 columns. Meant for small grids in tests.
std::vector<double> wave_jacobian_dense(const ModelParameters& p, const Grid1D& grid, std::span<const double> u,
                                        std::span<const double> v, double c);

/// Standing wave (c = 0). Translation is pinned by <guess', phi - guess> = 0.
/// A homogeneous guess skips the pinning and is reported as trivial. Throws
/// AnalysisError on a singular Jacobian or non-convergence.
WaveProfile solve_standing_wave(const ModelParameters& p, const Grid1D& grid, const FieldState& guess,
                                const WaveOptions& opt = {});

/// Travelling wave: Newton on the profile and c jointly, same phase condition.
WaveProfile solve_travelling_wave(const ModelParameters& p, const Grid1D& grid, const FieldState& guess,
                                  double c_guess, const WaveOptions& opt = {});

/// Periodic linear interpolation of every species onto another grid of the
/// same length.
FieldState resample(const FieldState& s, const Grid1D& from, const Grid1D& to);

/// Mirror xi -> -xi of a profile or guess.
FieldState reflect(const FieldState& s);

/// The singular construction sampled on `grid`, centred at x = 0; background
/// outside its range.
FieldState guess_from_singular(const SingularWave& w, const Grid1D& grid);

/// Circular shift so that the maximum of species 0 sits at the grid point
/// nearest x = 0.
FieldState centre_on_max(const FieldState& s, const Grid1D& grid);

/// Seed for the travelling-wave solver: the deterministic pulse
/// u* + exp(-x^2), v* + 2 sech^2(5x) run for time T splits into two
/// counter-propagating fronts; the half x < 0 is reset to the background and
/// the remaining pulse centred on its maximum.
FieldState travelling_pulse_seed(const ModelParameters& p, const Grid1D& grid, double T = 25.0, double dt = 1e-3);

/// v at the steepest point of u on the left flank (xi < position of max u),
/// linearly interpolated.
double transition_v(const WaveProfile& w);

struct SpeedFit {
  double speed = 0.0;
  double r2 = 0.0;
  std::size_t samples = 0;
};

/// Least-squares slope of the arg-max position of `species` against time over
/// snapshots with t in [t_lo, t_hi], unwrapped across the periodic boundary.
/// `x_window` restricts the search to [a, b). Sub-cell position by a
/// three-point parabola. Throws AnalysisError for a flat field or < 3 samples.
SpeedFit measure_speed(const SimulationTrace& trace, double t_lo, double t_hi,
                       std::optional<std::pair<double, double>> x_window = std::nullopt, std::size_t species = 0);

/// Columns xi,phi_u,phi_v.
void write_profile_csv(std::ostream& os, const WaveProfile& w);

}  // namespace cellwave
