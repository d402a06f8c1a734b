#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cellwave/grid.hpp"
#include "cellwave/network.hpp"
#include "cellwave/trace.hpp"

namespace cellwave {

/// Molecule counts per species and cell; density = count / omega.
struct CountState {
  double time = 0.0;
  std::size_t species = 0;
  std::size_t n = 0;
  double omega = 1.0;
  std::vector<std::int64_t> counts;  // species-major, like FieldState
};

/// counts = round(density * omega); negative densities map to 0.
CountState to_counts(const FieldState& field, double omega);
FieldState from_counts(const CountState& counts);

struct SsaResult {
  SimulationTrace trace;
  std::uint64_t events = 0;
  bool terminated_early = false;  // absorbing state or rate overflow
  std::string reason;
};

/// Direct-method Gillespie simulation on a periodic grid. Reaction j in a
/// cell fires at omega * max(0, R_j(N / omega)), or not at all if it would
/// drive a count negative. Each molecule hops to either neighbour at rate
/// D / h^2. Snapshot i holds the last state at or before snapshot_times[i],
/// stored as densities.
SsaResult simulate_ssa(const ReactionNetwork& net, const Grid1D& grid, const CountState& initial, double T,
                       std::uint64_t seed, std::span<const double> snapshot_times);

}  // namespace cellwave
