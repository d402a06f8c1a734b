#include "cellwave/pattern.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

#include "cellwave/equilibrium.hpp"
#include "cellwave/error.hpp"

namespace cellwave {

namespace {

std::vector<double> kernel(double sd) {
  const int radius = static_cast<int>(4.0 * sd + 0.5);
  std::vector<double> w(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) sum += w[i + radius] = std::exp(-0.5 * i * i / (sd * sd));
  for (double& x : w) x /= sum;
  return w;
}

class DisjointSet {
 public:
  explicit DisjointSet(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t a) {
    while (parent_[a] != a) a = parent_[a] = parent_[parent_[a]];
    return a;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

double mean_of(std::span<const double> v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_std(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace

double resolve_u_star(const ReactionNetwork& net) {
  const auto states = background_states(bhatt_parameters(net));
  if (states.size() != 1)
    throw AnalysisError("threshold needs a unique background state, found " + std::to_string(states.size()));
  return states.front().u_star;
}

std::vector<double> gaussian_smooth(std::span<const double> image, std::size_t rows, std::size_t cols,
                                    double sd_rows, double sd_cols) {
  if (image.size() != rows * cols) throw ConfigError("image size does not match its shape");
  std::vector<double> a(image.begin(), image.end());
  if (sd_cols > 0.0) {
    const auto w = kernel(sd_cols);
    const long r = static_cast<long>(w.size() / 2), n = static_cast<long>(cols);
    std::vector<double> row(cols);
    for (std::size_t i = 0; i < rows; ++i) {
      double* src = a.data() + i * cols;
      for (long k = 0; k < n; ++k) {
        double s = 0.0;
        for (long j = -r; j <= r; ++j) s += w[j + r] * src[((k + j) % n + n) % n];
        row[k] = s;
      }
      std::copy(row.begin(), row.end(), src);
    }
  }
  if (sd_rows > 0.0) {
    const auto w = kernel(sd_rows);
    const long r = static_cast<long>(w.size() / 2), m = static_cast<long>(rows);
    std::vector<double> out(a.size(), 0.0);
    for (long i = 0; i < m; ++i)
      for (long j = -r; j <= r; ++j) {
        const long src = std::clamp(i + j, 0L, m - 1);
        const double wj = w[j + r];
        for (std::size_t k = 0; k < cols; ++k) out[i * cols + k] += wj * a[src * cols + k];
      }
    a = std::move(out);
  }
  return a;
}

std::vector<EventBox> detect_events(const SimulationTrace& trace, const DetectorConfig& cfg) {
  const std::size_t rows = trace.snapshot_count(), cols = trace.points();
  if (rows < 2) throw ConfigError("event detection needs at least two snapshots");
  if (cfg.species >= trace.species_count()) throw ConfigError("detector species out of range");
  const double threshold = cfg.threshold_mult * cfg.u_star;
  if (!(threshold > 0.0)) throw ConfigError("event threshold must be positive");

  std::vector<double> raw(rows * cols);
  for (std::size_t i = 0; i < rows; ++i) {
    const auto f = trace.field(i, cfg.species);
    std::copy(f.begin(), f.end(), raw.begin() + i * cols);
  }
  const auto smooth = gaussian_smooth(raw, rows, cols, cfg.smooth_t, cfg.smooth_x);
  auto on = [&](std::size_t i, std::size_t k) { return smooth[i * cols + k] > threshold; };

  DisjointSet sets(rows * cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t k = 0; k < cols; ++k) {
      if (!on(i, k)) continue;
      const std::size_t right = (k + 1) % cols, left = (k + cols - 1) % cols;
      if (on(i, right)) sets.unite(i * cols + k, i * cols + right);
      if (i + 1 < rows)
        for (std::size_t kk : {left, k, right})
          if (on(i + 1, kk)) sets.unite(i * cols + k, (i + 1) * cols + kk);
    }

  struct Pixel {
    std::size_t root, row, col;
  };
  std::vector<Pixel> pixels;
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t k = 0; k < cols; ++k)
      if (on(i, k)) pixels.push_back({sets.find(i * cols + k), i, k});
  std::sort(pixels.begin(), pixels.end(), [](const Pixel& a, const Pixel& b) {
    return a.root != b.root ? a.root < b.root : a.col < b.col;
  });

  const auto& times = trace.times();
  const double dt_snap = times[1] - times[0];
  const Grid1D& g = trace.meta().grid;
  std::vector<EventBox> events;
  for (std::size_t a = 0; a < pixels.size();) {
    std::size_t b = a;
    std::size_t rmin = rows, rmax = 0;
    double peak = -std::numeric_limits<double>::infinity();
    std::vector<std::size_t> columns;
    while (b < pixels.size() && pixels[b].root == pixels[a].root) {
      const Pixel& p = pixels[b];
      rmin = std::min(rmin, p.row);
      rmax = std::max(rmax, p.row);
      peak = std::max(peak, raw[p.row * cols + p.col]);
      if (columns.empty() || columns.back() != p.col) columns.push_back(p.col);
      ++b;
    }
    // the widest empty gap between occupied columns, going round the circle
    std::size_t gap = 0, start = columns.front();
    for (std::size_t j = 0; j < columns.size(); ++j) {
      const std::size_t next = j + 1 < columns.size() ? columns[j + 1] : columns.front() + cols;
      if (next - columns[j] - 1 > gap) {
        gap = next - columns[j] - 1;
        start = next % cols;
      }
    }
    EventBox e;
    e.t_start = times[rmin];
    e.t_end = times[rmax] + (rmax + 1 < rows ? times[rmax + 1] - times[rmax] : dt_snap);
    e.length = e.t_end - e.t_start;
    e.x_left = g.x(start);
    e.width = static_cast<double>(cols - gap) * g.h();
    e.x_right = e.x_left + e.width;
    e.max_u = peak;
    e.pixels = b - a;
    e.truncated = rmin == 0 || rmax + 1 == rows;
    events.push_back(e);
    a = b;
  }
  std::sort(events.begin(), events.end(), [](const EventBox& x, const EventBox& y) {
    return x.t_start != y.t_start ? x.t_start < y.t_start : x.x_left < y.x_left;
  });
  return events;
}

EventStats summarise_events(std::span<const EventBox> events, std::size_t runs, double sigma) {
  EventStats s;
  s.sigma = sigma;
  s.runs = runs;
  s.events = events.size();
  std::vector<double> w, l, m;
  for (const auto& e : events) {
    w.push_back(e.width);
    l.push_back(e.length);
    m.push_back(e.max_u);
    if (!e.truncated) ++s.complete_events;
  }
  if (runs > 0) {
    s.mean_count = static_cast<double>(s.events) / static_cast<double>(runs);
    s.mean_count_complete = static_cast<double>(s.complete_events) / static_cast<double>(runs);
  }
  s.width_mean = mean_of(w);
  s.width_std = sample_std(w);
  s.length_mean = mean_of(l);
  s.length_std = sample_std(l);
  s.max_mean = mean_of(m);
  s.max_std = sample_std(m);
  return s;
}

Histogram histogram(std::span<const double> values, double bin_width) {
  if (!(bin_width > 0.0)) throw ConfigError("bin width must be positive");
  Histogram h;
  h.bin_width = bin_width;
  for (double v : values) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError("histogram values must be finite and >= 0");
    const auto bin = static_cast<std::size_t>(std::floor(v / bin_width));
    if (bin >= h.counts.size()) h.counts.resize(bin + 1, 0);
    ++h.counts[bin];
  }
  return h;
}

std::vector<Peak> find_peaks(std::span<const double> x, double min_prominence) {
  std::vector<Peak> peaks;
  const std::size_t n = x.size();
  std::size_t i = 1;
  while (i + 1 < n) {
    if (x[i - 1] < x[i]) {
      std::size_t ahead = i + 1;
      while (ahead + 1 < n && x[ahead] == x[i]) ++ahead;
      if (x[ahead] < x[i]) {
        const std::size_t left_edge = i, right_edge = ahead - 1;
        const std::size_t peak = (left_edge + right_edge) / 2;
        double left_min = x[peak];
        for (std::size_t j = peak + 1; j-- > 0;) {
          if (x[j] > x[peak]) break;
          left_min = std::min(left_min, x[j]);
        }
        double right_min = x[peak];
        for (std::size_t j = peak; j < n; ++j) {
          if (x[j] > x[peak]) break;
          right_min = std::min(right_min, x[j]);
        }
        const double prom = x[peak] - std::max(left_min, right_min);
        if (prom >= min_prominence) peaks.push_back({peak, prom});
        i = ahead;
        continue;
      }
    }
    ++i;
  }
  return peaks;
}

PeriodEstimate estimate_period(const SimulationTrace& trace, const PeriodOptions& opt) {
  if (opt.species >= trace.species_count()) throw ConfigError("period species out of range");
  std::vector<double> series, t;
  for (std::size_t i = 0; i < trace.snapshot_count(); ++i) {
    if (trace.times()[i] < opt.t_min) continue;
    const auto f = trace.field(i, opt.species);
    series.push_back(std::accumulate(f.begin(), f.end(), 0.0) / static_cast<double>(f.size()));
    t.push_back(trace.times()[i]);
  }
  if (series.size() < 3) throw AnalysisError("too few snapshots for a period estimate");
  const auto [lo, hi] = std::minmax_element(series.begin(), series.end());
  const auto peaks = find_peaks(series, opt.prominence * (*hi - *lo));
  if (peaks.size() < 2 || *hi == *lo)
    throw AnalysisError("period estimate needs at least two maxima, found " + std::to_string(peaks.size()));
  PeriodEstimate p;
  p.n_peaks = peaks.size();
  std::vector<double> gaps;
  for (std::size_t j = 0; j < peaks.size(); ++j) {
    p.peak_times.push_back(t[peaks[j].index]);
    if (j > 0) gaps.push_back(p.peak_times[j] - p.peak_times[j - 1]);
  }
  p.mean = mean_of(gaps);
  p.std = sample_std(gaps);
  return p;
}

void write_events_csv(std::ostream& os, std::span<const EventBox> events) {
  const auto old = os.precision(std::numeric_limits<double>::max_digits10);
  os << "run,t_start,t_end,x_left,x_right,length,width,max_u,truncated\n";
  for (const auto& e : events)
    os << e.run << ',' << e.t_start << ',' << e.t_end << ',' << e.x_left << ',' << e.x_right << ',' << e.length
       << ',' << e.width << ',' << e.max_u << ',' << (e.truncated ? 1 : 0) << '\n';
  os.precision(old);
}

void write_histogram_csv(std::ostream& os, const char* quantity, const Histogram& h) {
  for (std::size_t k = 0; k < h.counts.size(); ++k)
    os << quantity << ',' << h.origin + static_cast<double>(k) * h.bin_width << ','
       << h.origin + static_cast<double>(k + 1) * h.bin_width << ',' << h.counts[k] << '\n';
}

}  // namespace cellwave
