#include "cellwave/rde.hpp"

#include <cmath>

#include "cellwave/error.hpp"

namespace cellwave {

PeriodicLaplacian::PeriodicLaplacian(const Grid1D& grid, std::vector<double> diffusion)
    : n_(grid.size()), coeff_(std::move(diffusion)) {
  const double h2 = grid.h() * grid.h();
  for (double& c : coeff_) c /= h2;
}

void PeriodicLaplacian::apply(std::size_t s, std::span<const double> in, std::span<double> out) const {
  const double c = coeff_.at(s);
  for (std::size_t k = 0; k < n_; ++k) {
    const double left = in[k == 0 ? n_ - 1 : k - 1];
    const double right = in[k + 1 == n_ ? 0 : k + 1];
    out[k] = c * (left - 2.0 * in[k] + right);
  }
}

std::vector<double> PeriodicLaplacian::dense(std::size_t s) const {
  std::vector<double> a(n_ * n_, 0.0);
  const double c = coeff_.at(s);
  for (std::size_t k = 0; k < n_; ++k) {
    a[k * n_ + k] += -2.0 * c;
    a[k * n_ + (k + 1) % n_] += c;
    a[k * n_ + (k + n_ - 1) % n_] += c;
  }
  return a;
}

PeriodicLaplacian build_laplacian(const Grid1D& grid, std::span<const double> diffusion) {
  return PeriodicLaplacian(grid, {diffusion.begin(), diffusion.end()});
}

FieldState step_semi_implicit(const FieldState& state, const ReactionNetwork& net, const Grid1D& grid,
                              double dt) {
  Stepper stepper(net, grid, dt);
  FieldState next = state;
  stepper.step(next.values, 0, state.time);
  next.time = state.time + dt;
  return next;
}

SimulationTrace simulate(const ReactionNetwork& net, const Grid1D& grid, const FieldState& initial,
                         double T, double dt, const NoiseConfig& noise, std::uint64_t stride,
                         bool reference) {
  if (!(T > 0.0)) throw ConfigError("final time must be positive");
  if (stride == 0) throw ConfigError("snapshot stride must be >= 1");
  if (initial.species != net.species_count() || initial.n != grid.size() ||
      initial.values.size() != initial.species * initial.n)
    throw ConfigError("initial state does not match network and grid");
  for (std::size_t i = 0; i < initial.values.size(); ++i)
    if (!std::isfinite(initial.values[i]))
      throw NumericalError(initial.time, i % grid.size(), "non-finite initial value");

  TraceMeta meta;
  meta.scheme = noise.variant == NoiseVariant::None ? Scheme::Rde : Scheme::Cle;
  meta.variant = noise.variant;
  meta.grid = grid;
  meta.dt = dt;
  meta.stride = stride;
  meta.sigma = noise.sigma;
  meta.seed = noise.seed;
  for (const auto& s : net.species()) meta.species.push_back(s.name);
  SimulationTrace trace(std::move(meta));

  Stepper stepper(net, grid, dt, noise);
  const auto steps = static_cast<std::uint64_t>(std::llround(T / dt));
  std::vector<double> x = initial.values;
  const double t0 = initial.time;
  trace.append(t0, x);
  for (std::uint64_t i = 0; i < steps; ++i) {
    const double t = t0 + static_cast<double>(i) * dt;
    if (reference) {
      stepper.step_reference(x, i, t);
    } else {
      stepper.step(x, i, t);
    }
    if ((i + 1) % stride == 0) trace.append(t0 + static_cast<double>(i + 1) * dt, x);
  }
  return trace;
}

SimulationTrace simulate_rde(const ReactionNetwork& net, const Grid1D& grid, const FieldState& initial,
                             double T, double dt, std::uint64_t stride) {
  return simulate(net, grid, initial, T, dt, NoiseConfig{}, stride);
}

FieldState initial_state(const ReactionNetwork& net, const Grid1D& grid,
                         std::span<const std::string> expressions,
                         const std::map<std::string, double>& extra) {
  if (expressions.size() != net.species_count())
    throw ConfigError("need one initial-condition expression per species");
  std::map<std::string, double> constants = net.parameters();
  for (const auto& [k, v] : extra) constants[k] = v;
  constants["L"] = grid.length();
  const std::map<std::string, std::size_t> slots{{"x", 0}};
  FieldState state(net.species_count(), grid.size());
  for (std::size_t s = 0; s < expressions.size(); ++s) {
    const BoundExpr e(parse_expression(expressions[s]), slots, constants);
    auto f = state.field(s);
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const double x[] = {grid.x(k)};
      f[k] = e(x);
      if (!std::isfinite(f[k])) throw ConfigError("initial condition is not finite at x=" + std::to_string(x[0]));
    }
  }
  return state;
}

}  // namespace cellwave
