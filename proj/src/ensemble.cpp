#include "cellwave/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>

#include <omp.h>

#include "cellwave/equilibrium.hpp"
#include "cellwave/error.hpp"
#include "cellwave/rde.hpp"
#include "cellwave/rng.hpp"

namespace cellwave {

void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& task) {
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, std::max<std::size_t>(count, 1)));
  if (jobs <= 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < jobs; ++w)
      pool.emplace_back([&] {
        omp_set_num_threads(1);
        for (std::size_t i = next++; i < count && !failed; i = next++) {
          try {
            task(i);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
            failed = true;
          }
        }
      });
  }
  if (error) std::rethrow_exception(error);
}

FieldState ensemble_initial(const ReactionNetwork& net, const EnsembleConfig& cfg, std::uint64_t seed) {
  const auto states = background_states(bhatt_parameters(net));
  if (states.size() != 1) throw AnalysisError("ensemble start needs a unique background state");
  const auto& bg = states.front();
  const std::size_t n = cfg.grid.size();
  FieldState s(net.species_count(), n);
  const std::size_t iu = net.species_index("u"), iv = net.species_index("v");
  // stream 1 keeps these draws apart from the per-step noise counters
  PhiloxStream rng(seed, 1);
  for (std::size_t k = 0; k < n; ++k) {
    s.field(iu)[k] = bg.u_star * std::max(0.0, 1.0 + cfg.perturbation * rng.normal());
    s.field(iv)[k] = cfg.v_factor * bg.v_star;
  }
  return s;
}

SimulationTrace run_member(const ReactionNetwork& net, const EnsembleConfig& cfg, double sigma,
                           std::size_t member) {
  const std::uint64_t seed = cfg.base_seed + member;
  NoiseConfig noise{sigma == 0.0 ? NoiseVariant::None : cfg.variant, sigma, seed};
  return simulate(net, cfg.grid, ensemble_initial(net, cfg, seed), cfg.T, cfg.dt, noise, cfg.stride);
}

std::vector<SweepPoint> sigma_sweep(const ReactionNetwork& net, const EnsembleConfig& cfg,
                                    std::span<const double> sigmas, std::size_t runs,
                                    const DetectorConfig& detector) {
  if (runs == 0) throw ConfigError("ensemble size must be at least 1");
  std::vector<std::vector<EventBox>> per_task(sigmas.size() * runs);
  parallel_for(per_task.size(), cfg.jobs, [&](std::size_t task) {
    const std::size_t s = task / runs, member = task % runs;
    auto events = detect_events(run_member(net, cfg, sigmas[s], member), detector);
    for (auto& e : events) e.run = static_cast<int>(member);
    per_task[task] = std::move(events);
  });
  std::vector<SweepPoint> out(sigmas.size());
  for (std::size_t s = 0; s < sigmas.size(); ++s) {
    for (std::size_t m = 0; m < runs; ++m) {
      auto& ev = per_task[s * runs + m];
      out[s].events.insert(out[s].events.end(), ev.begin(), ev.end());
    }
    out[s].stats = summarise_events(out[s].events, runs, sigmas[s]);
  }
  return out;
}

double mean_event_count(const ReactionNetwork& net, const EnsembleConfig& cfg, double sigma, std::size_t runs,
                        const DetectorConfig& detector, double stop_at) {
  if (runs == 0) throw ConfigError("ensemble size must be at least 1");
  std::vector<std::optional<std::size_t>> counts(runs);
  std::atomic<std::size_t> total{0};
  parallel_for(runs, cfg.jobs, [&](std::size_t m) {
    if (stop_at > 0.0 && static_cast<double>(total.load()) >= stop_at) return;
    counts[m] = detect_events(run_member(net, cfg, sigma, m), detector).size();
    total += *counts[m];
  });
  // sum in member order so the value does not depend on scheduling unless stopped early
  std::size_t sum = 0;
  for (const auto& c : counts) sum += c.value_or(0);
  return static_cast<double>(sum) / static_cast<double>(runs);
}

Calibration calibrate_sigma(const ReactionNetwork& net, const EnsembleConfig& cfg, const DetectorConfig& detector,
                            double target, double lo, double hi, std::size_t runs, double rel_tol,
                            int max_evals) {
  if (!(target > 0.0) || !(lo > 0.0) || !(hi > lo)) throw ConfigError("calibration needs 0 < lo < hi and target > 0");
  Calibration c;
  auto eval = [&](double s) {
    ++c.evaluations;
    return mean_event_count(net, cfg, s, runs, detector);
  };
  auto close = [&](double count) { return std::abs(count - target) <= rel_tol * target; };
  double clo = eval(lo), chi = eval(hi);
  c.sigma = std::abs(std::log(clo + 0.5) - std::log(target)) < std::abs(std::log(chi + 0.5) - std::log(target)) ? lo : hi;
  c.mean_count = c.sigma == lo ? clo : chi;
  if (clo >= target || chi <= target) {
    c.converged = close(c.mean_count);
    return c;
  }
  while (c.evaluations < max_evals && !close(c.mean_count)) {
    const double a = std::log(clo + 0.5), b = std::log(chi + 0.5), t = std::log(target);
    double s = lo + (hi - lo) * (t - a) / (b - a);
    s = std::clamp(s, lo + 0.1 * (hi - lo), hi - 0.1 * (hi - lo));
    const double count = eval(s);
    c.sigma = s;
    c.mean_count = count;
    if (count < target) {
      lo = s;
      clo = count;
    } else {
      hi = s;
      chi = count;
    }
  }
  c.converged = close(c.mean_count);
  return c;
}

double activation_threshold(const ReactionNetwork& net, const EnsembleConfig& cfg, const DetectorConfig& detector,
                            double lo, double hi, double resolution, std::size_t runs) {
  if (!(resolution > 0.0) || !(hi > lo)) throw ConfigError("threshold search needs lo < hi and resolution > 0");
  // grid indices; invariant: index `b` qualifies (or is the upper end), `a` does not (or is -1)
  const auto steps = static_cast<long>(std::ceil((hi - lo) / resolution - 1e-9));
  auto sigma_at = [&](long k) { return std::min(hi, lo + static_cast<double>(k) * resolution); };
  auto active = [&](long k) {
    return mean_event_count(net, cfg, sigma_at(k), runs, detector, static_cast<double>(runs)) >= 1.0;
  };
  long a = -1, b = steps;
  while (b - a > 1) {
    const long mid = a + (b - a) / 2;
    if (active(mid))
      b = mid;
    else
      a = mid;
  }
  return sigma_at(b);
}

std::vector<PeriodPoint> period_vs_sigma(const ReactionNetwork& net, const EnsembleConfig& cfg,
                                         std::span<const double> sigmas, std::size_t runs,
                                         const PeriodOptions& opt) {
  if (runs == 0) throw ConfigError("ensemble size must be at least 1");
  std::vector<std::pair<std::size_t, std::size_t>> work;  // (sigma index, member)
  for (std::size_t s = 0; s < sigmas.size(); ++s)
    for (std::size_t m = 0; m < (sigmas[s] == 0.0 ? 1 : runs); ++m) work.emplace_back(s, m);
  std::vector<std::optional<PeriodEstimate>> result(work.size());
  parallel_for(work.size(), cfg.jobs, [&](std::size_t i) {
    const auto [s, m] = work[i];
    try {
      result[i] = estimate_period(run_member(net, cfg, sigmas[s], m), opt);
    } catch (const AnalysisError&) {
      result[i].reset();
    }
  });
  std::vector<PeriodPoint> out(sigmas.size());
  for (std::size_t s = 0; s < sigmas.size(); ++s) out[s].sigma = sigmas[s];
  std::vector<std::vector<double>> means(sigmas.size());
  for (std::size_t i = 0; i < work.size(); ++i) {
    PeriodPoint& p = out[work[i].first];
    ++p.runs;
    if (!result[i]) {
      ++p.failed;
      continue;
    }
    means[work[i].first].push_back(result[i]->mean);
    p.spacing_std += result[i]->std;
    p.regularity += result[i]->std / result[i]->mean;
  }
  for (std::size_t s = 0; s < sigmas.size(); ++s) {
    PeriodPoint& p = out[s];
    const auto& m = means[s];
    if (m.empty()) {
      p.period_mean = p.period_std = p.spacing_std = p.regularity = std::nan("");
      continue;
    }
    const double k = static_cast<double>(m.size());
    for (double x : m) p.period_mean += x / k;
    for (double x : m) p.period_std += (x - p.period_mean) * (x - p.period_mean);
    p.period_std = m.size() > 1 ? std::sqrt(p.period_std / (k - 1.0)) : 0.0;
    p.spacing_std /= k;
    p.regularity /= k;
  }
  return out;
}

}  // namespace cellwave
