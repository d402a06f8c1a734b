#include "cellwave/cle.hpp"

#include <algorithm>
#include <cmath>

#include "cellwave/error.hpp"
#include "cellwave/rde.hpp"

namespace cellwave {

namespace {

std::vector<double> cell_values(std::span<const double> state, std::size_t m, std::size_t n, std::size_t k) {
  std::vector<double> c(m);
  for (std::size_t s = 0; s < m; ++s) c[s] = state[s * n + k];
  return c;
}

}  // namespace

std::vector<double> reaction_noise_formA(const ReactionNetwork& net, std::span<const double> state,
                                         std::size_t n, double sigma, std::span<const double> increments) {
  const std::size_t m = net.species_count(), r = net.reaction_count();
  if (increments.size() != n * r) throw ConfigError("form A needs N increments per cell");
  std::vector<double> out(m * n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const auto R = net.evaluate_propensities(cell_values(state, m, n, k));
    for (std::size_t s = 0; s < m; ++s) {
      double g = 0.0;
      for (std::size_t j = 0; j < r; ++j)
        g += net.stoich(s, j) * std::sqrt(std::max(0.0, R[j])) * increments[k * r + j];
      out[s * n + k] = sigma * g;
    }
  }
  return out;
}

std::vector<double> reaction_noise_formB(const ReactionNetwork& net, std::span<const double> state,
                                         std::size_t n, double sigma, std::span<const double> increments) {
  if (!net.noise_covariance_diagonal())
    throw ModelError("form B noise needs a diagonal S diag(R) S^T");
  const std::size_t m = net.species_count(), r = net.reaction_count();
  if (increments.size() != n * m) throw ConfigError("form B needs M increments per cell");
  std::vector<double> out(m * n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const auto R = net.evaluate_propensities(cell_values(state, m, n, k));
    for (std::size_t s = 0; s < m; ++s) {
      double var = 0.0;
      for (std::size_t j = 0; j < r; ++j) {
        const int c = net.stoich(s, j);
        var += c * c * std::max(0.0, R[j]);
      }
      out[s * n + k] = sigma * std::sqrt(var) * increments[k * m + s];
    }
  }
  return out;
}

std::vector<double> diffusion_noise(std::span<const double> state, std::span<const double> diffusion,
                                    const Grid1D& grid, double sigma, std::span<const double> increments) {
  const std::size_t n = grid.size(), m = diffusion.size();
  if (state.size() != m * n || increments.size() != m * n)
    throw ConfigError("diffusion noise needs M increments per edge");
  std::vector<double> flux(m * n), out(m * n);
  for (std::size_t e = 0; e < n; ++e)
    for (std::size_t s = 0; s < m; ++s) {
      const double mean = 0.5 * (state[s * n + e] + state[s * n + (e + 1) % n]);
      flux[s * n + e] = std::sqrt(2.0 * diffusion[s] * std::max(0.0, mean)) * increments[e * m + s];
    }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t s = 0; s < m; ++s)
      out[s * n + k] = sigma * (flux[s * n + k] - flux[s * n + (k + n - 1) % n]) / grid.h();
  return out;
}

FieldState step_cle(const FieldState& state, const ReactionNetwork& net, const Grid1D& grid, double dt,
                    const NoiseConfig& noise, std::uint64_t step) {
  Stepper stepper(net, grid, dt, noise);
  FieldState next = state;
  stepper.step(next.values, step, state.time);
  next.time = state.time + dt;
  return next;
}

SimulationTrace simulate_cle(const ReactionNetwork& net, const Grid1D& grid, const FieldState& initial,
                             double T, double dt, const NoiseConfig& noise, std::uint64_t stride) {
  return simulate(net, grid, initial, T, dt, noise, stride);
}

}  // namespace cellwave
