#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cellwave/grid.hpp"
#include "cellwave/network.hpp"
#include "cellwave/trace.hpp"
#include "cellwave/tridiag.hpp"

namespace cellwave {

struct NoiseConfig {
  NoiseVariant variant = NoiseVariant::None;
  double sigma = 0.0;
  std::uint64_t seed = 0;

  /// True when the step must reduce to the deterministic scheme exactly.
  bool silent() const { return variant == NoiseVariant::None || sigma == 0.0; }
};

/// Semi-implicit Euler-Maruyama step for a reaction network on a periodic grid:
///   (I - dt A) X(t+dt) = X(t) + dt S R(X(t)) + sigma g(X(t)) dW,
/// then X <- max(X, 0) when noise is active. A is the periodic second
/// difference scaled by each species' diffusion coefficient.
///
/// Draws per step are indexed, not streamed: reaction channels cell-major
/// (index k*C + c), then diffusion edges edge-major with species inner
/// (index n*C + e*M + s). Edge e joins cells e and e+1 (mod n).
class Stepper {
 public:
  Stepper(const ReactionNetwork& net, const Grid1D& grid, double dt, NoiseConfig noise = {});

  const Grid1D& grid() const { return grid_; }
  double dt() const { return dt_; }
  const NoiseConfig& noise() const { return noise_; }

  /// Reaction channels per cell (N for form A, M for form B, 1 for additive).
  std::size_t channels_per_cell() const { return channels_; }
  bool has_diffusion_noise() const { return diffusion_noise_; }
  std::uint64_t draws_per_step() const;

  /// Advance `state` (species-major, M*n values) by one step. `step` indexes
  /// the random numbers; `time` is only used in diagnostics. Throws
  /// NumericalError on a non-finite value.
  void step(std::span<double> state, std::uint64_t step, double time = 0.0);

  /// Same result bit for bit, computed cell by cell with the scalar
  /// propensity evaluator and no threading.
  void step_reference(std::span<double> state, std::uint64_t step, double time = 0.0);

 private:
  void solve_and_finish(std::span<double> state, double time);

  const ReactionNetwork* net_;
  Grid1D grid_;
  double dt_;
  NoiseConfig noise_;
  std::size_t m_, r_, n_;
  std::size_t channels_ = 0;
  bool diffusion_noise_ = false;
  std::size_t additive_species_ = 0;
  double noise_scale_;  // sqrt(dt / h)
  std::vector<double> diffusion_;
  std::vector<CyclicTridiagonal> solvers_;
  std::vector<int> stoich_;  // species-major M x N
  std::vector<double> rhs_;
  std::vector<double> flux_;  // M x n edge fluxes
};

}  // namespace cellwave
