#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "cellwave/ensemble.hpp"
#include "cellwave/error.hpp"
#include "cellwave/rde.hpp"
#include "cellwave/ssa.hpp"
#include "cellwave/stats.hpp"
#include "commands.hpp"

namespace cellwave::cli {

namespace {

struct Context {
  RunOutput& out;
  const Globals& g;
  std::size_t ensemble;
  std::string which;
};

struct Bundle {
  std::string id;
  std::string summary;
  std::function<void(Context&)> run;
};

std::string tag(double x) {
  std::ostringstream os;
  os << std::setprecision(6) << x;
  return os.str();
}

const char* kPulse[] = {"u_star + exp(-x^2)", "v_star + 2/cosh(5*x)^2"};

ExperimentConfig base_config(double c1) {
  ExperimentConfig c;
  c.parameters["c1"] = c1;
  return c;
}

// one simulation recorded in the manifest under "runs"
SimulationTrace simulate_into(Context& ctx, const std::string& name, const ExperimentConfig& c) {
  std::cerr << "  " << name << ": " << scheme_name(c.scheme) << " sigma=" << c.sigma << " T=" << c.T << '\n';
  const SimulationTrace tr = run_simulation(c, ctx.out);
  write_trace(ctx.out.file(name + ".bin"), tr);
  ctx.out.manifest()["runs"][name] = to_json(c);
  return tr;
}

EnsembleConfig ensemble_config(const Context& ctx, std::size_t n = 512) {
  EnsembleConfig e;
  e.grid = Grid1D(40.0, n);
  e.jobs = ctx.g.jobs;
  return e;
}

json ensemble_json(const EnsembleConfig& e, std::size_t runs) {
  return {{"L", e.grid.length()}, {"n", e.grid.size()},         {"T", e.T},
          {"dt", e.dt},           {"stride", e.stride},         {"variant", std::string(variant_name(e.variant))},
          {"base_seed", e.base_seed}, {"v_factor", e.v_factor}, {"perturbation", e.perturbation},
          {"runs", runs}};
}

json sweep_row(const SweepPoint& p) { return stats_json(p.stats); }

void fig3_1(Context& ctx) {
  ModelParameters p = ModelParameters::baseline();
  json j;
  j["scan"] = write_hopf_scan(ctx.out, hopf_scan(p, 0.05, 0.5, 450));
  for (double c1 : {0.1, 0.18, 0.2, 0.35, 0.4}) {
    p.c1 = c1;
    j["states"][tag(c1)] = states_json(background_states(p));
    write_nullclines(ctx.out, p, "c1_" + tag(c1) + "_");
  }
  write_json(ctx.out.file("bifurcation.json"), j);
}

void fig3_2(Context& ctx) {
  const ModelParameters p = ModelParameters::baseline();
  const Grid1D grid(80.0, 2048);
  const WaveProfile w = solve_standing_wave(p, grid, guess_from_singular(singular_standing_wave(p), grid));
  write_profile(ctx.out, w);
  json j = wave_json(w);
  j["background"] = states_json(background_states(p));
  write_json(ctx.out.file("wave.json"), j);
  write_nullclines(ctx.out, p);
  write_json(ctx.out.file("gspt.json"), write_gspt(ctx.out, p));
}

void fig3_3(Context& ctx) {
  ExperimentConfig c = base_config(0.1);
  c.init = {kPulse[0], kPulse[1]};
  c.T = 20.0;
  c.stride = 50;
  simulate_into(ctx, "trace", c);
  c.L = 120.0;
  c.n = 3072;
  c.T = 75.0;
  c.stride = 100;
  simulate_into(ctx, "trace_long", c);
}

void fig3_4(Context& ctx) {
  const ReactionNetwork net = builtin_bhatt_model(ModelParameters::baseline());
  DetectorConfig det;
  det.u_star = resolve_u_star(net);
  json stats;
  const std::pair<const char*, double> panels[] = {{"a", 0.002}, {"b", 0.035}, {"c", 0.05}, {"d", 0.5}};
  for (const auto& [panel, sigma] : panels) {
    ExperimentConfig c = base_config(0.1);
    c.scheme = Scheme::Cle;
    c.sigma = sigma;
    c.seed = 7;
    if (sigma < 0.01) {
      c.init = {kPulse[0], kPulse[1]};
      c.T = 20.0;
      c.stride = 50;
    }
    const std::string name = std::string("trace_") + panel;
    const SimulationTrace tr = simulate_into(ctx, name, c);
    const auto events = detect_events(tr, det);
    stats[panel] = write_events(ctx.out, events, 1, sigma, std::string(panel) + "_");
  }
  write_json(ctx.out.file("stats.json"), stats);
}

void fig3_5a(Context& ctx) {
  const ReactionNetwork net = builtin_bhatt_model(ModelParameters::baseline());
  EnsembleConfig e = ensemble_config(ctx, 1024);
  DetectorConfig det;
  det.u_star = resolve_u_star(net);
  const double sigma = 0.046;
  const SimulationTrace tr = run_member(net, e, sigma, 0);
  write_trace(ctx.out.file("trace.bin"), tr);
  json j = write_events(ctx.out, detect_events(tr, det), 1, sigma);
  j["ensemble"] = ensemble_json(e, 1);
  write_json(ctx.out.file("stats.json"), j);
}

void fig3_5b(Context& ctx) {
  const ReactionNetwork net = builtin_bhatt_model(ModelParameters::baseline());
  const EnsembleConfig e = ensemble_config(ctx);
  DetectorConfig det;
  det.u_star = resolve_u_star(net);
  const std::vector<double> sigmas{0.02, 0.03, 0.035, 0.04, 0.046, 0.05, 0.06};
  const auto sweep = sigma_sweep(net, e, sigmas, ctx.ensemble, det);
  std::ofstream os(ctx.out.file("sweep.csv"));
  os << "sigma,runs,mean_count,mean_count_complete,width_mean,width_std,length_mean,length_std,max_mean,max_std\n";
  json points = json::array();
  for (const auto& p : sweep) {
    const auto& s = p.stats;
    os << s.sigma << ',' << s.runs << ',' << s.mean_count << ',' << s.mean_count_complete << ',' << s.width_mean
       << ',' << s.width_std << ',' << s.length_mean << ',' << s.length_std << ',' << s.max_mean << ',' << s.max_std
       << '\n';
    points.push_back(sweep_row(p));
  }
  write_events(ctx.out, sweep[4].events, ctx.ensemble, sigmas[4], "sigma_0.046_");
  write_json(ctx.out.file("sweep.json"), {{"ensemble", ensemble_json(e, ctx.ensemble)}, {"points", points}});
}

void fig3_6(Context& ctx) {
  const ReactionNetwork net = builtin_bhatt_model(ModelParameters::baseline());
  DetectorConfig det;
  det.u_star = resolve_u_star(net);
  struct Arm {
    const char* name;
    NoiseVariant variant;
    double lo, hi;
  };
  const Arm arms[] = {{"full", NoiseVariant::FullCleFormB, 0.05, 0.08},
                      {"no_diffusion", NoiseVariant::CleNoDiffusionNoise, 0.05, 0.08},
                      {"additive", NoiseVariant::AdditiveWhiteU, 0.3, 1.0}};
  json j;
  std::map<std::string, std::vector<EventBox>> pooled;
  for (const auto& arm : arms) {
    EnsembleConfig e = ensemble_config(ctx);
    e.variant = arm.variant;
    // event shapes shift with the event rate, so the arms must match counts closely
    const Calibration cal = calibrate_sigma(net, e, det, 50.0, arm.lo, arm.hi, ctx.ensemble, 0.03, 10);
    std::cerr << "  " << arm.name << ": sigma " << cal.sigma << " (" << cal.mean_count << " events/run)\n";
    const double sigmas[] = {cal.sigma};
    auto sweep = sigma_sweep(net, e, sigmas, ctx.ensemble, det);
    j[arm.name] = write_events(ctx.out, sweep[0].events, ctx.ensemble, cal.sigma, std::string(arm.name) + "_");
    j[arm.name]["calibration"] = {{"sigma", cal.sigma}, {"mean_count", cal.mean_count},
                                  {"evaluations", cal.evaluations}, {"converged", cal.converged}};
    pooled[arm.name] = std::move(sweep[0].events);
  }
  auto column = [](const std::vector<EventBox>& ev, double EventBox::*m) {
    std::vector<double> v;
    for (const auto& e : ev) v.push_back(e.*m);
    return v;
  };
  for (const char* other : {"no_diffusion", "additive"}) {
    for (auto [q, m] : {std::pair{"width", &EventBox::width}, {"length", &EventBox::length}, {"max_u", &EventBox::max_u}}) {
      const auto a = column(pooled["full"], m), b = column(pooled[other], m);
      if (a.empty() || b.empty()) continue;
      const TestResult r = ks_two_sample(a, b);
      j["ks"][std::string("full_vs_") + other][q] = {{"D", r.statistic}, {"p", r.p_value}};
    }
  }
  const auto widths = column(pooled["full"], &EventBox::width);
  if (widths.size() >= 20) {
    const TestResult r = NormalityTest()(widths);
    j["normality_full_width"] = {{"D", r.statistic}, {"p", r.p_value}};
  }
  write_json(ctx.out.file("stats.json"), j);
}

void fig3_7(Context& ctx) {
  const ModelParameters p = [] {
    ModelParameters q;
    q.c1 = 0.2;
    return q;
  }();
  ExperimentConfig c = base_config(0.2);
  c.init = {kPulse[0], kPulse[1]};
  c.L = 200.0;
  c.n = 4096;
  c.T = 25.0;
  const SimulationTrace det = simulate_into(ctx, "trace_deterministic", c);

  json j;
  const SpeedFit fit = measure_speed(det, 10.0, 25.0, std::pair{0.0, 100.0});
  j["pde_speed_right_pulse"] = {{"speed", fit.speed}, {"r2", fit.r2}};

  const Grid1D seed_grid(200.0, 4096), grid(200.0, 8192);
  const WaveProfile w = solve_travelling_wave(p, grid, resample(travelling_pulse_seed(p, seed_grid), seed_grid, grid), 2.0);
  write_profile(ctx.out, w);
  j["wave"] = wave_json(w);

  for (double sigma : {0.02, 0.05}) {
    ExperimentConfig s = base_config(0.2);
    s.scheme = Scheme::Cle;
    s.sigma = sigma;
    s.T = 200.0;
    s.seed = 1;
    s.init = {"u_star", "4*v_star"};
    const SimulationTrace tr = simulate_into(ctx, "trace_sigma_" + tag(sigma), s);
    for (double prom : {0.3, 0.1}) {
      try {
        j["period"][tag(sigma)]["prominence_" + tag(prom)] = period_json(estimate_period(tr, {0, prom, 20.0}));
      } catch (const AnalysisError& e) {
        j["period"][tag(sigma)]["prominence_" + tag(prom)] = {{"error", e.what()}};
      }
    }
  }
  write_json(ctx.out.file("travelling.json"), j);
}

void periodic(Context& ctx, double sigma) {
  const ReactionNetwork net = builtin_bhatt_model([] {
    ModelParameters q;
    q.c1 = 0.4;
    return q;
  }());
  EnsembleConfig e = ensemble_config(ctx, 1024);
  const SimulationTrace tr = run_member(net, e, sigma, 0);
  write_trace(ctx.out.file("trace.bin"), tr);
  json j = period_json(estimate_period(tr, {0, 0.1, 20.0}));
  j["sigma"] = sigma;
  j["ensemble_config"] = ensemble_json(e, 1);
  if (sigma > 0.0) {
    const EnsembleConfig small = ensemble_config(ctx);
    const double sigmas[] = {sigma};
    const auto pts = period_vs_sigma(net, small, sigmas, ctx.ensemble, {0, 0.1, 20.0});
    j["ensemble"] = {{"runs", pts[0].runs},         {"failed", pts[0].failed},
                     {"period_mean", pts[0].period_mean}, {"period_std", pts[0].period_std},
                     {"n", small.grid.size()}};
  }
  write_json(ctx.out.file("period.json"), j);
}

void fig3_11(Context& ctx) {
  if (ctx.which != "wt" && ctx.which != "pten" && ctx.which != "both")
    throw ConfigError("--which must be wt, pten or both");
  json j;
  std::vector<std::pair<std::string, ModelParameters>> cells;
  if (ctx.which != "pten") cells.emplace_back("wt", ModelParameters::wild_type());
  if (ctx.which != "wt") cells.emplace_back("pten", ModelParameters::pten_null());
  for (const auto& [name, p] : cells) {
    const ReactionNetwork net = builtin_bhatt_model(p);
    DetectorConfig det;
    det.u_star = resolve_u_star(net);
    const double sigma = 0.06;

    EnsembleConfig one = ensemble_config(ctx, 1024);
    const SimulationTrace tr = run_member(net, one, sigma, 0);
    write_trace(ctx.out.file(name + "_cle.bin"), tr);
    j[name]["cle"] = write_events(ctx.out, detect_events(tr, det), 1, sigma, name + "_cle_");

    // Gillespie counterpart: per-cell system size h / sigma^2 matches the CLE noise level
    const Grid1D coarse(40.0, 256);
    const double omega = coarse.h() / (sigma * sigma);
    EnsembleConfig ce = one;
    ce.grid = coarse;
    const FieldState init = ensemble_initial(net, ce, ce.base_seed);
    std::vector<double> times;
    for (int k = 0; k <= 500; ++k) times.push_back(0.1 * k);
    std::cerr << "  " << name << ": ssa omega=" << omega << '\n';
    const SsaResult ssa = simulate_ssa(net, coarse, to_counts(init, omega), 50.0, ce.base_seed, times);
    write_trace(ctx.out.file(name + "_ssa.bin"), ssa.trace);
    j[name]["ssa"] = write_events(ctx.out, detect_events(ssa.trace, det), 1, 0.0, name + "_ssa_");
    j[name]["ssa"]["omega"] = omega;
    j[name]["ssa"]["reactions"] = ssa.events;

    const EnsembleConfig e = ensemble_config(ctx);
    const double sigmas[] = {sigma};
    const auto sweep = sigma_sweep(net, e, sigmas, ctx.ensemble, det);
    j[name]["ensemble"] = write_events(ctx.out, sweep[0].events, ctx.ensemble, sigma, name + "_ensemble_");
  }
  write_json(ctx.out.file("stats.json"), j);
}

void figA_1(Context& ctx) {
  ExperimentConfig c = base_config(0.15);
  c.init = {kPulse[0], kPulse[1]};
  c.L = 120.0;
  c.n = 4096;
  c.T = 40.0;
  json j;
  for (double dt : {6.25e-4, 2.5e-3}) {
    c.dt = dt;
    c.stride = static_cast<std::uint64_t>(std::llround(0.1 / dt));
    const SimulationTrace tr = simulate_into(ctx, "trace_dt_" + tag(dt), c);
    try {
      const SpeedFit f = measure_speed(tr, 20.0, 40.0, std::pair{0.0, 60.0});
      j[tag(dt)] = {{"speed", f.speed}, {"r2", f.r2}};
    } catch (const AnalysisError& e) {
      j[tag(dt)] = {{"error", e.what()}};
    }
  }
  write_json(ctx.out.file("speeds.json"), j);
}

void figA_2(Context& ctx) {
  json j;
  std::ofstream os(ctx.out.file("period_vs_sigma.csv"));
  os << "c1,sigma,runs,failed,period_mean,period_std,spacing_std,regularity\n";
  struct Regime {
    double c1, T, prominence;
    std::vector<double> sigmas;
  };
  const Regime regimes[] = {{0.4, 100.0, 0.1, {0.0, 0.005, 0.01, 0.015, 0.02, 0.03}},
                            {0.2, 200.0, 0.3, {0.02, 0.03, 0.04, 0.05}}};
  for (const auto& r : regimes) {
    ModelParameters p;
    p.c1 = r.c1;
    EnsembleConfig e = ensemble_config(ctx);
    e.T = r.T;
    const auto pts = period_vs_sigma(builtin_bhatt_model(p), e, r.sigmas, ctx.ensemble, {0, r.prominence, 20.0});
    std::vector<double> means;
    for (const auto& pt : pts) {
      os << r.c1 << ',' << pt.sigma << ',' << pt.runs << ',' << pt.failed << ',' << pt.period_mean << ','
         << pt.period_std << ',' << pt.spacing_std << ',' << pt.regularity << '\n';
      means.push_back(pt.period_mean);
    }
    const TestResult mk = mann_kendall(means);
    j[tag(r.c1)] = {{"prominence", r.prominence}, {"mann_kendall_S", mk.statistic}, {"mann_kendall_p", mk.p_value}};
  }
  write_json(ctx.out.file("trend.json"), j);
}

void figB_1(Context& ctx) {
  const ModelParameters base = ModelParameters::baseline();
  json j = write_gspt(ctx.out, base);
  for (double Du : {0.1, 0.01}) {
    ModelParameters p = base;
    p.Du = Du;
    const Grid1D grid(80.0, Du < 0.05 ? 8192 : 2048);
    const WaveProfile w = solve_standing_wave(p, grid, guess_from_singular(singular_standing_wave(p), grid));
    write_profile(ctx.out, w, "Du_" + tag(Du) + "_");
    j["standing"][tag(Du)] = wave_json(w);
  }
  // level set of the fast Hamiltonian through the lower branch at vbar
  const JumpValue jv = jump_value(base);
  std::ofstream os(ctx.out.file("fast_orbit.csv"));
  os << "xi,u,p\n";
  for (const auto& s : fast_orbit(base, jv.vbar, jv.u_minus + 1e-6, 0.0, 60.0))
    os << s.xi << ',' << s.u << ',' << s.p << '\n';
  write_json(ctx.out.file("singular.json"), j);
}

const std::vector<Bundle>& bundles() {
  static const std::vector<Bundle> all{
      {"fig3_1", "background states, nullclines and eigenvalue scan over c1", fig3_1},
      {"fig3_2", "standing wave at c1=0.1 (L=80, n=2048) with nullclines and jump value", fig3_2},
      {"fig3_3", "deterministic pulse splitting at c1=0.1; long run on L=120", fig3_3},
      {"fig3_4", "CLE panels at c1=0.1 for sigma 0.002, 0.035, 0.05, 0.5", fig3_4},
      {"fig3_5a", "one CLE run at sigma=0.046 with its event boxes", fig3_5a},
      {"fig3_5b", "event statistics against sigma (n=512 ensembles)", fig3_5b},
      {"fig3_6", "histograms of three noise variants calibrated to about 50 events per run", fig3_6},
      {"fig3_7", "travelling regime c1=0.2: PDE run, BVP profile, noisy runs with periods", fig3_7},
      {"fig3_8", "periodic regime c1=0.4, deterministic, with period", [](Context& c) { periodic(c, 0.0); }},
      {"fig3_10", "periodic regime c1=0.4 at sigma=0.01, with ensemble period", [](Context& c) { periodic(c, 0.01); }},
      {"fig3_11", "wild-type against PTEN-null at sigma=0.06: CLE, Gillespie, ensemble stats", fig3_11},
      {"figA_1", "time-step sensitivity at c1=0.15 (L=120, n=4096)", figA_1},
      {"figA_2", "period against sigma in the periodic and travelling regimes", figA_2},
      {"figB_1", "singular construction against standing waves at Du=0.1 and 0.01", figB_1},
  };
  return all;
}

}  // namespace

void add_reproduce(CLI::App& app, Globals& g) {
  auto* sub = app.add_subcommand("reproduce", "Data bundle for one figure at desk scale");
  auto id = std::make_shared<std::string>();
  auto ensemble = std::make_shared<std::size_t>(20);
  auto which = std::make_shared<std::string>("both");
  auto list = std::make_shared<bool>(false);
  sub->add_option("figure", *id, "Figure id (see --list)");
  sub->add_option("--ensemble", *ensemble, "Runs per ensemble")->capture_default_str()->check(CLI::PositiveNumber);
  sub->add_option("--which", *which, "fig3_11: wt, pten or both")->capture_default_str();
  sub->add_flag("--list", *list, "List figure ids");
  sub->callback([&g, id, ensemble, which, list] {
    if (*list || id->empty()) {
      for (const auto& b : bundles()) std::cout << std::left << std::setw(9) << b.id << b.summary << '\n';
      if (!*list) throw ConfigError("reproduce needs a figure id");
      return;
    }
    const auto it = std::find_if(bundles().begin(), bundles().end(), [&](const Bundle& b) { return b.id == *id; });
    if (it == bundles().end()) throw ConfigError("unknown figure id '" + *id + "' (see reproduce --list)");
    RunOutput out(g, *id);
    out.manifest()["figure"] = it->id;
    out.manifest()["summary"] = it->summary;
    out.manifest()["ensemble"] = *ensemble;
    if (it->id == "fig3_11") out.manifest()["which"] = *which;
    Context ctx{out, g, *ensemble, *which};
    it->run(ctx);
    out.finish();
  });
}

}  // namespace cellwave::cli
