#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "cellwave/error.hpp"
#include "cellwave/rde.hpp"
#include "commands.hpp"

namespace cellwave::cli {

json states_json(const std::vector<BackgroundState>& states) {
  json a = json::array();
  for (const auto& s : states) {
    a.push_back({{"u_star", s.u_star},
                 {"v_star", s.v_star},
                 {"eigenvalues",
                  {{s.eigenvalues[0].real(), s.eigenvalues[0].imag()}, {s.eigenvalues[1].real(), s.eigenvalues[1].imag()}}},
                 {"class", std::string(stability_name(s.classification))},
                 {"multiplicity", s.multiplicity}});
  }
  return a;
}

void write_nullclines(RunOutput& out, const ModelParameters& p, const std::string& prefix) {
  std::vector<double> u(400);
  for (std::size_t k = 0; k < u.size(); ++k) u[k] = 1e-3 * std::pow(5e3, static_cast<double>(k) / (u.size() - 1));
  std::ofstream os(out.file(prefix + "nullclines.csv"));
  os.precision(10);
  os << "u,v_u_nullcline,v_v_nullcline\n";
  for (const auto& s : nullclines(p, u)) os << s.u << ',' << s.v_on_u_nullcline << ',' << s.v_on_v_nullcline << '\n';
}

json write_hopf_scan(RunOutput& out, const HopfScan& scan, const std::string& prefix) {
  std::ofstream os(out.file(prefix + "hopf_scan.csv"));
  write_scan_csv(os, scan);
  auto bracket = [](const std::optional<Bracket>& b) {
    return b ? json{{"lo", b->lo}, {"hi", b->hi}, {"mid", b->mid()}} : json(nullptr);
  };
  return {{"real_to_complex", bracket(scan.real_to_complex)}, {"hopf", bracket(scan.hopf)}};
}

json write_gspt(RunOutput& out, const ModelParameters& p, const std::string& prefix) {
  const JumpValue jv = jump_value(p);
  json j{{"vbar", jv.vbar},
         {"u_minus", jv.u_minus},
         {"u_plus", jv.u_plus},
         {"delta_h", jv.delta_h},
         {"folds", {{"v_lo", jv.folds.v_lo}, {"u_lo", jv.folds.u_lo}, {"v_hi", jv.folds.v_hi}, {"u_hi", jv.folds.u_hi}}}};
  try {
    const SingularWave w = singular_standing_wave(p);
    std::ofstream os(out.file(prefix + "singular_wave.csv"));
    os.precision(10);
    os << "x,u,v\n";
    for (std::size_t k = 0; k < w.x.size(); ++k) os << w.x[k] << ',' << w.u[k] << ',' << w.v[k] << '\n';
    j["singular_wave"] = {{"u_star", w.u_star}, {"v_star", w.v_star}, {"q_jump", w.q_jump},
                          {"v_max", w.v_max},   {"x_jump", w.x_jump}};
  } catch (const AnalysisError& e) {
    j["singular_wave"] = {{"error", e.what()}};
  }
  return j;
}

json wave_json(const WaveProfile& w) {
  json j{{"c", w.c},
         {"residual", w.residual},
         {"iterations", w.iterations},
         {"converged", w.converged},
         {"trivial", w.trivial},
         {"L", w.grid.length()},
         {"n", w.grid.size()}};
  if (!w.trivial) j["transition_v"] = transition_v(w);
  return j;
}

void write_profile(RunOutput& out, const WaveProfile& w, const std::string& prefix) {
  std::ofstream os(out.file(prefix + "profile.csv"));
  write_profile_csv(os, w);
}

json stats_json(const EventStats& s) {
  return {{"sigma", s.sigma},
          {"runs", s.runs},
          {"events", s.events},
          {"complete_events", s.complete_events},
          {"mean_count", s.mean_count},
          {"mean_count_complete", s.mean_count_complete},
          {"width", {{"mean", s.width_mean}, {"std", s.width_std}}},
          {"length", {{"mean", s.length_mean}, {"std", s.length_std}}},
          {"max_u", {{"mean", s.max_mean}, {"std", s.max_std}}}};
}

json write_events(RunOutput& out, std::span<const EventBox> events, std::size_t runs, double sigma,
                  const std::string& prefix) {
  {
    std::ofstream os(out.file(prefix + "events.csv"));
    write_events_csv(os, events);
  }
  std::vector<double> length, width, max_u;
  for (const auto& e : events) {
    length.push_back(e.length);
    width.push_back(e.width);
    max_u.push_back(e.max_u);
  }
  std::ofstream os(out.file(prefix + "histograms.csv"));
  write_histogram_csv(os, "length", histogram(length, 0.25));
  write_histogram_csv(os, "width", histogram(width, 0.25));
  write_histogram_csv(os, "max_u", histogram(max_u, 0.1));
  return stats_json(summarise_events(events, runs, sigma));
}

json period_json(const PeriodEstimate& e) {
  return {{"period_mean", e.mean}, {"period_std", e.std}, {"n_peaks", e.n_peaks}, {"peak_times", e.peak_times}};
}

namespace {

ModelParameters parameters_of(const ExperimentConfig& c) { return bhatt_parameters(build_network(c)); }

std::tuple<double, double, std::size_t> parse_range(const std::string& s) {
  double lo = 0, hi = 0;
  std::size_t steps = 0;
  char c1 = 0, c2 = 0;
  std::istringstream is(s);
  if (!(is >> lo >> c1 >> hi >> c2 >> steps) || c1 != ':' || c2 != ':' || !is.eof() || !(hi > lo))
    throw ConfigError("--c1 expects lo:hi:steps with lo < hi, got '" + s + "'");
  return {lo, hi, steps};
}

// last snapshot of a trace file, on the given grid
FieldState state_from_trace(const std::string& path, const Grid1D& grid) {
  const SimulationTrace tr = read_trace(path);
  if (tr.snapshot_count() == 0) throw ConfigError(path + " has no snapshots");
  if (tr.species_count() != 2) throw ConfigError("wave analysis needs a two-species trace");
  const Grid1D& from = tr.meta().grid;
  FieldState s = tr.state(tr.snapshot_count() - 1);
  if (from.size() != grid.size()) s = resample(s, from, grid);
  return centre_on_max(s, grid);
}

struct WaveArgs {
  std::string kind = "standing";
  std::string trace;
  double c_guess = 2.0;
  double seed_T = 25.0;
  std::size_t seed_n = 4096;
  double check_T = 0.0;
  double check_dt = 5e-4;
};

void run_wave(const ExperimentConfig& c, const WaveArgs& a, RunOutput& out) {
  const ModelParameters p = parameters_of(c);
  const Grid1D grid = c.grid();
  WaveProfile w;
  if (a.kind == "standing") {
    const FieldState guess =
        a.trace.empty() ? guess_from_singular(singular_standing_wave(p), grid) : state_from_trace(a.trace, grid);
    w = solve_standing_wave(p, grid, guess);
  } else if (a.kind == "travelling") {
    FieldState guess;
    if (a.trace.empty()) {
      const Grid1D seed_grid(c.L, a.seed_n);
      guess = resample(travelling_pulse_seed(p, seed_grid, a.seed_T, c.dt), seed_grid, grid);
    } else {
      guess = state_from_trace(a.trace, grid);
    }
    w = solve_travelling_wave(p, grid, guess, a.c_guess);
  } else {
    throw ConfigError("--kind must be standing or travelling");
  }
  json j = wave_json(w);
  j["kind"] = a.kind;
  try {
    j["vbar"] = jump_value(p).vbar;
  } catch (const AnalysisError&) {
    j["vbar"] = nullptr;
  }
  if (a.check_T > 0.0) {
    FieldState s(2, grid.size());
    std::copy(w.u.begin(), w.u.end(), s.values.begin());
    std::copy(w.v.begin(), w.v.end(), s.values.begin() + grid.size());
    const auto stride = static_cast<std::uint64_t>(std::max(1.0, std::round(0.05 / a.check_dt)));
    const SimulationTrace tr = simulate_rde(builtin_bhatt_model(p), grid, s, a.check_T, a.check_dt, stride);
    const SpeedFit fit = measure_speed(tr, a.check_T / 6.0, a.check_T);
    j["pde_check"] = {{"T", a.check_T}, {"dt", a.check_dt}, {"speed", fit.speed}, {"r2", fit.r2},
                      {"relative_difference", w.c != 0.0 ? (fit.speed - w.c) / w.c : 0.0}};
  }
  write_profile(out, w, "");
  write_json(out.file("wave.json"), j);
  std::cout << j.dump() << '\n';
}

}  // namespace

void add_analyze(CLI::App& app, Globals& g) {
  auto* an = app.add_subcommand("analyze", "Analyses of a model or of simulation traces");
  an->require_subcommand(1);

  {
    auto* sub = an->add_subcommand("equilibria", "Background states and nullclines");
    auto flags = std::make_shared<ConfigFlags>();
    flags->add(*sub);
    sub->callback([&g, flags] {
      const ExperimentConfig c = flags->resolve();
      RunOutput out(g, "equilibria");
      out.manifest()["config"] = to_json(c);
      const ModelParameters p = parameters_of(c);
      const json j{{"c1", p.c1}, {"states", states_json(background_states(p))}};
      write_json(out.file("equilibria.json"), j);
      write_nullclines(out, p);
      std::cout << j.dump() << '\n';
      out.finish();
    });
  }
  {
    auto* sub = an->add_subcommand("hopf-scan", "Eigenvalue scan of the background state over c1");
    auto flags = std::make_shared<ConfigFlags>();
    auto range = std::make_shared<std::string>("0.05:0.5:450");
    flags->add(*sub, false);
    sub->add_option("--c1", *range, "Scan range lo:hi:steps")->capture_default_str();
    sub->callback([&g, flags, range] {
      const ExperimentConfig c = flags->resolve();
      const auto [lo, hi, steps] = parse_range(*range);
      RunOutput out(g, "hopf-scan");
      out.manifest()["config"] = to_json(c);
      const json j = write_hopf_scan(out, hopf_scan(parameters_of(c), lo, hi, steps));
      write_json(out.file("hopf_scan.json"), j);
      std::cout << j.dump() << '\n';
      out.finish();
    });
  }
  {
    auto* sub = an->add_subcommand("wave", "Standing or travelling wave profile by Newton's method");
    auto flags = std::make_shared<ConfigFlags>();
    auto a = std::make_shared<WaveArgs>();
    flags->add(*sub);
    sub->add_option("--kind", a->kind, "standing or travelling")->capture_default_str();
    sub->add_option("--trace", a->trace, "Use the last snapshot of this trace as the initial guess");
    sub->add_option("--c-guess", a->c_guess, "Initial speed for travelling waves")->capture_default_str();
    sub->add_option("--seed-T", a->seed_T, "Travelling: pulse run time for the guess")->capture_default_str();
    sub->add_option("--seed-n", a->seed_n, "Travelling: grid points of the guess run")->capture_default_str();
    sub->add_option("--check-T", a->check_T, "Run the PDE from the profile and fit the front speed")
        ->capture_default_str();
    sub->add_option("--check-dt", a->check_dt, "Time step of the PDE check")->capture_default_str();
    sub->callback([&g, flags, a] {
      const ExperimentConfig c = flags->resolve();
      RunOutput out(g, "wave");
      out.manifest()["config"] = to_json(c);
      run_wave(c, *a, out);
      out.finish();
    });
  }
  {
    auto* sub = an->add_subcommand("gspt", "Jump value, folds and singular standing wave");
    auto flags = std::make_shared<ConfigFlags>();
    flags->add(*sub);
    sub->callback([&g, flags] {
      const ExperimentConfig c = flags->resolve();
      RunOutput out(g, "gspt");
      out.manifest()["config"] = to_json(c);
      const json j = write_gspt(out, parameters_of(c));
      write_json(out.file("gspt.json"), j);
      std::cout << j.dump() << '\n';
      out.finish();
    });
  }
  {
    auto* sub = an->add_subcommand("events", "Event boxes and statistics of one or more traces");
    auto flags = std::make_shared<ConfigFlags>();
    auto traces = std::make_shared<std::vector<std::string>>();
    auto det = std::make_shared<DetectorConfig>();
    auto u_star = std::make_shared<double>(0.0);
    flags->add(*sub);
    sub->add_option("--trace", *traces, "Trace files (pooled)")->required()->check(CLI::ExistingFile);
    sub->add_option("--threshold", det->threshold_mult, "Threshold as a multiple of u*")->capture_default_str();
    sub->add_option("--smooth-x", det->smooth_x, "Gaussian sd in cells")->capture_default_str();
    sub->add_option("--smooth-t", det->smooth_t, "Gaussian sd in snapshots")->capture_default_str();
    sub->add_option("--species", det->species, "Species index")->capture_default_str();
    sub->add_option("--u-star", *u_star, "Background level; default from the model");
    sub->callback([&g, flags, traces, det, u_star] {
      const ExperimentConfig c = flags->resolve(manifest_config_near(traces->front()));
      RunOutput out(g, "events");
      out.manifest()["config"] = to_json(c);
      DetectorConfig d = *det;
      d.u_star = *u_star > 0.0 ? *u_star : resolve_u_star(build_network(c));
      std::vector<EventBox> all;
      double sigma = 0.0;
      for (std::size_t r = 0; r < traces->size(); ++r) {
        const SimulationTrace tr = read_trace((*traces)[r]);
        sigma = tr.meta().sigma;
        for (EventBox e : detect_events(tr, d)) {
          e.run = static_cast<int>(r);
          all.push_back(e);
        }
      }
      json j = write_events(out, all, traces->size(), sigma);
      j["threshold"] = d.threshold_mult * d.u_star;
      write_json(out.file("stats.json"), j);
      std::cout << j.dump() << '\n';
      out.finish();
    });
  }
  {
    auto* sub = an->add_subcommand("period", "Oscillation period from maxima of the spatial mean");
    auto traces = std::make_shared<std::vector<std::string>>();
    auto opt = std::make_shared<PeriodOptions>();
    sub->add_option("--trace", *traces, "Trace files")->required()->check(CLI::ExistingFile);
    sub->add_option("--prominence", opt->prominence, "Minimum prominence, fraction of the series range")
        ->capture_default_str();
    sub->add_option("--t-min", opt->t_min, "Ignore snapshots before this time")->capture_default_str();
    sub->add_option("--species", opt->species, "Species index")->capture_default_str();
    sub->callback([&g, traces, opt] {
      RunOutput out(g, "period");
      json runs = json::array();
      double sum = 0.0;
      std::size_t ok = 0;
      for (const auto& path : *traces) {
        try {
          const PeriodEstimate e = estimate_period(read_trace(path), *opt);
          runs.push_back(period_json(e));
          sum += e.mean;
          ++ok;
        } catch (const AnalysisError& e) {
          if (traces->size() == 1) throw;
          out.warn(path + ": " + e.what());
          runs.push_back({{"error", e.what()}});
        }
      }
      if (ok == 0) throw AnalysisError("no trace produced a period estimate");
      const json j{{"prominence", opt->prominence}, {"t_min", opt->t_min}, {"period_mean", sum / ok}, {"runs", runs}};
      write_json(out.file("period.json"), j);
      std::cout << j.dump() << '\n';
      out.finish();
    });
  }
}

}  // namespace cellwave::cli
