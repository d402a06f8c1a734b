#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "cellwave/grid.hpp"
#include "cellwave/network.hpp"
#include "cellwave/stepper.hpp"
#include "cellwave/trace.hpp"

namespace cellwave {

/// Periodic second difference D (u[k-1] - 2u[k] + u[k+1]) / h^2 per species.
class PeriodicLaplacian {
 public:
  PeriodicLaplacian(const Grid1D& grid, std::vector<double> diffusion);

  std::size_t species() const { return coeff_.size(); }
  /// out = A in for one species field.
  void apply(std::size_t species, std::span<const double> in, std::span<double> out) const;
  /// Dense n x n matrix of one species block, row-major (for tests).
  std::vector<double> dense(std::size_t species) const;

 private:
  std::size_t n_;
  std::vector<double> coeff_;  // D / h^2
};

PeriodicLaplacian build_laplacian(const Grid1D& grid, std::span<const double> diffusion);

/// One deterministic semi-implicit step.
FieldState step_semi_implicit(const FieldState& state, const ReactionNetwork& net, const Grid1D& grid,
                              double dt);

/// Runs round(T/dt) steps; snapshots at t=0 and every `stride` steps. When
/// `reference` is set the serial scalar kernel is used.
SimulationTrace simulate(const ReactionNetwork& net, const Grid1D& grid, const FieldState& initial,
                         double T, double dt, const NoiseConfig& noise, std::uint64_t stride,
                         bool reference = false);

SimulationTrace simulate_rde(const ReactionNetwork& net, const Grid1D& grid, const FieldState& initial,
                             double T, double dt, std::uint64_t stride = 1);

/// Initial fields from expressions in x (cell position), the network
/// parameters, and `extra` symbols such as u_star / v_star.
FieldState initial_state(const ReactionNetwork& net, const Grid1D& grid,
                         std::span<const std::string> expressions,
                         const std::map<std::string, double>& extra = {});

}  // namespace cellwave
