#include "cellwave/ssa.hpp"

#include <algorithm>
#include <cmath>

#include "cellwave/error.hpp"
#include "cellwave/rng.hpp"

namespace cellwave {

namespace {

// Prefix sums over non-negative cell rates with O(log n) update and search.
class Fenwick {
 public:
  explicit Fenwick(std::size_t n) : tree_(n + 1, 0.0), values_(n, 0.0) {}

  void set(std::size_t i, double v) {
    const double delta = v - values_[i];
    values_[i] = v;
    for (std::size_t k = i + 1; k < tree_.size(); k += k & (~k + 1)) tree_[k] += delta;
  }
  double value(std::size_t i) const { return values_[i]; }
  double total() const {
    double t = 0.0;
    for (std::size_t k = tree_.size() - 1; k > 0; k -= k & (~k + 1)) t += tree_[k];
    return t;
  }
  // smallest i with prefix(i+1) > target
  std::size_t find(double target) const {
    std::size_t pos = 0;
    std::size_t step = std::bit_floor(tree_.size() - 1);
    for (; step > 0; step >>= 1) {
      if (pos + step < tree_.size() && tree_[pos + step] <= target) {
        pos += step;
        target -= tree_[pos];
      }
    }
    return std::min(pos, values_.size() - 1);
  }
  // removes the drift accumulated by many incremental updates
  void rebuild() {
    std::fill(tree_.begin(), tree_.end(), 0.0);
    for (std::size_t i = 0; i < values_.size(); ++i) {
      tree_[i + 1] += values_[i];
      const std::size_t parent = (i + 1) + ((i + 1) & (~(i + 1) + 1));
      if (parent < tree_.size()) tree_[parent] += tree_[i + 1];
    }
  }

 private:
  std::vector<double> tree_;
  std::vector<double> values_;
};

}  // namespace

CountState to_counts(const FieldState& field, double omega) {
  if (!(omega > 0.0) || !std::isfinite(omega)) throw ConfigError("omega must be positive");
  CountState c;
  c.time = field.time;
  c.species = field.species;
  c.n = field.n;
  c.omega = omega;
  c.counts.resize(field.values.size());
  for (std::size_t i = 0; i < field.values.size(); ++i)
    c.counts[i] = std::max<std::int64_t>(0, std::llround(field.values[i] * omega));
  return c;
}

FieldState from_counts(const CountState& c) {
  FieldState f(c.species, c.n, c.time);
  for (std::size_t i = 0; i < c.counts.size(); ++i) f.values[i] = static_cast<double>(c.counts[i]) / c.omega;
  return f;
}

SsaResult simulate_ssa(const ReactionNetwork& net, const Grid1D& grid, const CountState& initial, double T,
                       std::uint64_t seed, std::span<const double> snapshot_times) {
  const std::size_t m = net.species_count(), r = net.reaction_count(), n = grid.size();
  if (initial.species != m || initial.n != n || initial.counts.size() != m * n)
    throw ConfigError("initial counts do not match network and grid");
  if (!(T > 0.0)) throw ConfigError("final time must be positive");
  if (!(initial.omega > 0.0)) throw ConfigError("omega must be positive");
  for (std::size_t i = 1; i < snapshot_times.size(); ++i)
    if (!(snapshot_times[i] > snapshot_times[i - 1])) throw ConfigError("snapshot times must increase");

  const double omega = initial.omega;
  const double h2 = grid.h() * grid.h();
  std::vector<double> hop(m);
  const auto diffusion = net.diffusion_coefficients();
  for (std::size_t s = 0; s < m; ++s) hop[s] = diffusion[s] / h2;

  TraceMeta meta;
  meta.scheme = Scheme::Ssa;
  meta.grid = grid;
  meta.omega = omega;
  meta.sigma = 1.0 / std::sqrt(omega);
  meta.seed = seed;
  for (const auto& s : net.species()) meta.species.push_back(s.name);
  SsaResult result{SimulationTrace(std::move(meta))};

  std::vector<std::int64_t> N = initial.counts;
  // per cell: r reaction channels then m hop channels (both directions)
  const std::size_t channels = r + m;
  std::vector<double> rates(n * channels, 0.0);
  Fenwick tree(n);
  std::vector<double> density(m), R(r);

  auto refresh = [&](std::size_t k) {
    for (std::size_t s = 0; s < m; ++s) density[s] = static_cast<double>(N[s * n + k]) / omega;
    if (r > 0) net.evaluate_propensities(density, R);
    double total = 0.0;
    double* cell = rates.data() + k * channels;
    for (std::size_t j = 0; j < r; ++j) {
      double a = omega * std::max(0.0, R[j]);
      for (std::size_t s = 0; s < m && a > 0.0; ++s)
        if (N[s * n + k] + net.stoich(s, j) < 0) a = 0.0;
      cell[j] = a;
      total += a;
    }
    for (std::size_t s = 0; s < m; ++s) {
      cell[r + s] = 2.0 * hop[s] * static_cast<double>(N[s * n + k]);
      total += cell[r + s];
    }
    tree.set(k, total);
  };
  for (std::size_t k = 0; k < n; ++k) refresh(k);

  std::vector<double> snap(m * n);
  auto record = [&](double t) {
    for (std::size_t i = 0; i < N.size(); ++i) snap[i] = static_cast<double>(N[i]) / omega;
    result.trace.append(t, snap);
  };

  PhiloxStream rng(seed);
  double t = initial.time;
  std::size_t next_snap = 0;
  while (next_snap < snapshot_times.size() && snapshot_times[next_snap] < t) ++next_snap;
  const double t_end = initial.time + T;

  for (;;) {
    const double total = tree.total();
    if (!std::isfinite(total)) {
      result.terminated_early = true;
      result.reason = "event rate overflow at t=" + std::to_string(t);
      return result;
    }
    const double t_next = total > 0.0 ? t + rng.exponential(total) : INFINITY;
    while (next_snap < snapshot_times.size() && snapshot_times[next_snap] < t_next &&
           snapshot_times[next_snap] <= t_end)
      record(snapshot_times[next_snap++]);
    if (total <= 0.0) {
      result.terminated_early = true;
      result.reason = "absorbing state (zero total rate) at t=" + std::to_string(t);
      return result;
    }
    if (t_next > t_end) break;
    t = t_next;

    const std::size_t k = tree.find(rng.uniform() * total);
    const double* cell = rates.data() + k * channels;
    double cell_total = 0.0;
    for (std::size_t c = 0; c < channels; ++c) cell_total += cell[c];
    double target = rng.uniform() * cell_total;
    std::size_t c = 0;
    for (; c + 1 < channels; ++c) {
      if (target < cell[c]) break;
      target -= cell[c];
    }
    while (cell[c] == 0.0 && c > 0) --c;  // rounding landed past the last live channel

    if (c < r) {
      for (std::size_t s = 0; s < m; ++s) N[s * n + k] += net.stoich(s, c);
      refresh(k);
    } else {
      const std::size_t s = c - r;
      const std::size_t dest = rng.uniform() < 0.5 ? (k == 0 ? n - 1 : k - 1) : (k + 1 == n ? 0 : k + 1);
      --N[s * n + k];
      ++N[s * n + dest];
      refresh(k);
      refresh(dest);
    }
    if (++result.events % 65536 == 0) tree.rebuild();
  }
  return result;
}

}  // namespace cellwave
