#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "cellwave/network.hpp"
#include "cellwave/trace.hpp"

namespace cellwave {

/// One connected region of the thresholded (x, t) image. Extents are pixel
/// extents: x_right = x_left + width may run past L/2 when the event wraps.
struct EventBox {
  double t_start = 0.0, t_end = 0.0;
  double x_left = 0.0, x_right = 0.0;
  double length = 0.0;  // t_end - t_start
  double width = 0.0;   // x_right - x_left
  double max_u = 0.0;   // unsmoothed maximum over the region
  std::size_t pixels = 0;
  bool truncated = false;  // touches the first or last snapshot
  int run = 0;             // ensemble member, filled in by sweeps
};

struct DetectorConfig {
  std::size_t species = 0;
  double smooth_x = 2.0;  // Gaussian standard deviation in cells; 0 disables
  double smooth_t = 2.0;  // in snapshots
  double threshold_mult = 5.0;
  double u_star = 0.0;    // threshold = threshold_mult * u_star
};

/// Background activator level used for thresholds; AnalysisError unless the
/// model has exactly one background state.
double resolve_u_star(const ReactionNetwork& net);

/// Separable Gaussian filter of a rows x cols image (row = snapshot), periodic
/// along columns and edge-clamped along rows, kernel truncated at 4 sd.
std::vector<double> gaussian_smooth(std::span<const double> image, std::size_t rows, std::size_t cols,
                                    double sd_rows, double sd_cols);

/// Smooth, threshold, 8-connected labelling periodic in x, bounding boxes.
/// Ordered by (t_start, x_left). Throws ConfigError with fewer than two
/// snapshots or a non-positive threshold.
std::vector<EventBox> detect_events(const SimulationTrace& trace, const DetectorConfig& cfg);

struct EventStats {
  double sigma = 0.0;
  std::size_t runs = 0;
  std::size_t events = 0;
  std::size_t complete_events = 0;  // not truncated
  double mean_count = 0.0;
  double mean_count_complete = 0.0;
  double width_mean = 0.0, width_std = 0.0;
  double length_mean = 0.0, length_std = 0.0;
  double max_mean = 0.0, max_std = 0.0;
};

/// Pooled statistics over all events of `runs` simulations.
EventStats summarise_events(std::span<const EventBox> events, std::size_t runs, double sigma = 0.0);

struct Histogram {
  double bin_width = 0.0;
  double origin = 0.0;  // left edge of bin 0
  std::vector<std::size_t> counts;
};

/// Fixed edges origin + k * bin_width with origin = 0.
Histogram histogram(std::span<const double> values, double bin_width);

struct PeriodOptions {
  std::size_t species = 0;
  double prominence = 0.1;  // fraction of the series range
  double t_min = 0.0;       // ignore snapshots before this time
};

struct PeriodEstimate {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation of the spacings
  std::size_t n_peaks = 0;
  std::vector<double> peak_times;
};

/// Spatial mean per snapshot, then peaks of at least the given prominence
/// (topographic, as in scipy.signal.find_peaks). AnalysisError with fewer
/// than two peaks.
PeriodEstimate estimate_period(const SimulationTrace& trace, const PeriodOptions& opt = {});

/// Index of local maxima with their prominences; plateaus report their middle.
struct Peak {
  std::size_t index;
  double prominence;
};
std::vector<Peak> find_peaks(std::span<const double> series, double min_prominence);

/// run,t_start,t_end,x_left,x_right,length,width,max_u,truncated
void write_events_csv(std::ostream& os, std::span<const EventBox> events);
/// quantity,bin_left,bin_right,count
void write_histogram_csv(std::ostream& os, const char* quantity, const Histogram& h);

}  // namespace cellwave
