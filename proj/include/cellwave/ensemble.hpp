#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "cellwave/grid.hpp"
#include "cellwave/network.hpp"
#include "cellwave/pattern.hpp"
#include "cellwave/stepper.hpp"
#include "cellwave/trace.hpp"

namespace cellwave {

/// Calls task(i) for i in [0, count) on `jobs` worker threads (0 means the
/// hardware concurrency). Each worker runs its OpenMP kernels single-threaded
/// when jobs > 1. The first exception is rethrown after all workers stop.
void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& task);

/// Everything needed to run one stochastic member of an ensemble.
struct EnsembleConfig {
  Grid1D grid{40.0, 512};
  double T = 100.0;
  double dt = 1e-3;
  std::uint64_t stride = 100;  // snapshot every 0.1 time units at the default dt
  NoiseVariant variant = NoiseVariant::FullCleFormB;
  std::uint64_t base_seed = 1;
  double v_factor = 4.0;        // start from (u*, v_factor * v*)
  double perturbation = 0.01;   // relative amplitude of the random u perturbation
  unsigned jobs = 0;
};

/// The member's initial condition: (u*, v_factor v*) with u multiplied by
/// 1 + perturbation * xi, xi standard normal from the member seed.
FieldState ensemble_initial(const ReactionNetwork& net, const EnsembleConfig& cfg, std::uint64_t seed);

/// One member: seed = base_seed + member.
SimulationTrace run_member(const ReactionNetwork& net, const EnsembleConfig& cfg, double sigma,
                           std::size_t member);

struct SweepPoint {
  EventStats stats;
  std::vector<EventBox> events;  // pooled, with EventBox::run set
};

/// Event statistics per sigma over `runs` members each. Work is spread over
/// (sigma, member) pairs; results do not depend on cfg.jobs.
std::vector<SweepPoint> sigma_sweep(const ReactionNetwork& net, const EnsembleConfig& cfg,
                                    std::span<const double> sigmas, std::size_t runs,
                                    const DetectorConfig& detector);

/// Mean event count over `runs` members; stops early once the total reaches
/// `stop_at` (0 disables), in which case the value is a lower bound.
double mean_event_count(const ReactionNetwork& net, const EnsembleConfig& cfg, double sigma, std::size_t runs,
                        const DetectorConfig& detector, double stop_at = 0.0);

struct Calibration {
  double sigma = 0.0;
  double mean_count = 0.0;
  int evaluations = 0;
  bool converged = false;
};

/// Sigma giving about `target` events per run: secant on log(count) inside
/// [lo, hi], stopping within rel_tol of the target or after max_evals.
Calibration calibrate_sigma(const ReactionNetwork& net, const EnsembleConfig& cfg, const DetectorConfig& detector,
                            double target, double lo, double hi, std::size_t runs, double rel_tol = 0.15,
                            int max_evals = 8);

/// Smallest sigma on the grid lo + k * resolution with mean event count >= 1
/// over `runs` members, by bisection. Returns hi when no grid point below it
/// qualifies; assumes the count grows with sigma.
double activation_threshold(const ReactionNetwork& net, const EnsembleConfig& cfg, const DetectorConfig& detector,
                            double lo, double hi, double resolution, std::size_t runs);

struct PeriodPoint {
  double sigma = 0.0;
  std::size_t runs = 0;
  std::size_t failed = 0;      // members with fewer than two peaks
  double period_mean = 0.0;    // mean of the per-run mean periods
  double period_std = 0.0;     // spread of the per-run means
  double spacing_std = 0.0;    // mean of the per-run spacing standard deviations
  double regularity = 0.0;     // mean of per-run spacing std / mean
};

/// Period estimate per sigma. sigma = 0 runs the deterministic scheme once.
std::vector<PeriodPoint> period_vs_sigma(const ReactionNetwork& net, const EnsembleConfig& cfg,
                                         std::span<const double> sigmas, std::size_t runs,
                                         const PeriodOptions& opt);

}  // namespace cellwave
