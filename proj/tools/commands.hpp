#pragma once

#include <CLI11.hpp>

#include <span>

#include "cellwave/equilibrium.hpp"
#include "cellwave/gspt.hpp"
#include "cellwave/pattern.hpp"
#include "cellwave/trace.hpp"
#include "cellwave/wave.hpp"
#include "common.hpp"

namespace cellwave::cli {

void add_simulate(CLI::App& app, Globals& g);
void add_analyze(CLI::App& app, Globals& g);
void add_reproduce(CLI::App& app, Globals& g);

/// Runs the configured scheme; flag interactions (sigma with rde, omega
/// without ssa) become warnings on `out`.
SimulationTrace run_simulation(const ExperimentConfig& c, RunOutput& out);

// Writers shared by analyze and reproduce. File names get `prefix` prepended.

json states_json(const std::vector<BackgroundState>& states);
/// nullclines.csv: u,v_u_nullcline,v_v_nullcline on a log grid in u.
void write_nullclines(RunOutput& out, const ModelParameters& p, const std::string& prefix = "");
/// hopf_scan.csv plus the transition brackets as JSON.
json write_hopf_scan(RunOutput& out, const HopfScan& scan, const std::string& prefix = "");
/// singular_wave.csv (x,u,v); returns the jump value and folds as JSON.
json write_gspt(RunOutput& out, const ModelParameters& p, const std::string& prefix = "");
json wave_json(const WaveProfile& w);
void write_profile(RunOutput& out, const WaveProfile& w, const std::string& prefix = "");
json stats_json(const EventStats& s);
/// events.csv, histograms.csv (bin width 0.25 for length and width, 0.1 for
/// max_u) and event statistics; returns the statistics.
json write_events(RunOutput& out, std::span<const EventBox> events, std::size_t runs, double sigma,
                  const std::string& prefix = "");
json period_json(const PeriodEstimate& e);

}  // namespace cellwave::cli
