#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cellwave/grid.hpp"
#include "cellwave/network.hpp"
#include "cellwave/stepper.hpp"
#include "cellwave/trace.hpp"

namespace cellwave {

// Stochastic forcing terms for one step. `increments` are already scaled
// draws with variance dt/h. States and forcings are species-major M*n.

/// sigma S sqrt(diag R) dW per cell; increments hold N values per cell (cell-major).
std::vector<double> reaction_noise_formA(const ReactionNetwork& net, std::span<const double> state,
                                         std::size_t n, double sigma, std::span<const double> increments);

/// sigma sqrt(S diag R S^T) dW per cell; increments hold M values per cell.
/// Throws ModelError when the covariance is not diagonal.
std::vector<double> reaction_noise_formB(const ReactionNetwork& net, std::span<const double> state,
                                         std::size_t n, double sigma, std::span<const double> increments);

/// Divergence of edge fluxes sqrt(2 D max(0, mean)) xi; increments hold M
/// values per edge (edge-major), edge e joining cells e and e+1.
std::vector<double> diffusion_noise(std::span<const double> state, std::span<const double> diffusion,
                                    const Grid1D& grid, double sigma, std::span<const double> increments);

/// One stochastic step; `step` indexes the counter-based draws.
FieldState step_cle(const FieldState& state, const ReactionNetwork& net, const Grid1D& grid, double dt,
                    const NoiseConfig& noise, std::uint64_t step);

SimulationTrace simulate_cle(const ReactionNetwork& net, const Grid1D& grid, const FieldState& initial,
                             double T, double dt, const NoiseConfig& noise, std::uint64_t stride = 1);

}  // namespace cellwave
