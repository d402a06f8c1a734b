#include <fstream>

#include "cellwave/cle.hpp"
#include "cellwave/error.hpp"
#include "cellwave/rde.hpp"
#include "cellwave/ssa.hpp"
#include "commands.hpp"

namespace cellwave::cli {

SimulationTrace run_simulation(const ExperimentConfig& c, RunOutput& out) {
  const ReactionNetwork net = build_network(c);
  const FieldState init = build_initial(net, c);
  for (const auto& w : sanity_warnings(net, c)) out.warn(w);
  if (c.scheme == Scheme::Rde && c.sigma > 0.0) out.warn("--sigma has no effect with the rde scheme; ignored");
  if (c.scheme != Scheme::Ssa && c.omega > 0.0) out.warn("--omega only applies to the ssa scheme; ignored");

  switch (c.scheme) {
    case Scheme::Rde:
      return simulate_rde(net, c.grid(), init, c.T, c.dt, c.stride);
    case Scheme::Cle:
      return simulate_cle(net, c.grid(), init, c.T, c.dt, NoiseConfig{c.variant, c.sigma, c.seed}, c.stride);
    case Scheme::Ssa: {
      std::vector<double> times;
      const double every = static_cast<double>(c.stride) * c.dt;
      for (std::size_t k = 0; static_cast<double>(k) * every <= c.T * (1 + 1e-12); ++k)
        times.push_back(static_cast<double>(k) * every);
      auto r = simulate_ssa(net, c.grid(), to_counts(init, c.omega), c.T, c.seed, times);
      out.manifest()["ssa"] = {{"events", r.events}, {"terminated_early", r.terminated_early}, {"reason", r.reason}};
      if (r.terminated_early) out.warn("ssa stopped early: " + r.reason);
      return std::move(r.trace);
    }
  }
  throw ConfigError("unknown scheme");
}

void add_simulate(CLI::App& app, Globals& g) {
  auto* sub = app.add_subcommand("simulate", "Run one simulation and write trace.bin + manifest.json");
  auto flags = std::make_shared<ConfigFlags>();
  auto csv = std::make_shared<bool>(false);
  flags->add(*sub);
  sub->add_flag("--csv", *csv, "Also write trace.csv (long format t,x,species,value)");
  sub->callback([&g, flags, csv] {
    const ExperimentConfig c = flags->resolve();
    RunOutput out(g, "simulate");
    out.manifest()["config"] = to_json(c);
    const SimulationTrace trace = run_simulation(c, out);
    write_trace(out.file("trace.bin"), trace);
    if (*csv) {
      std::ofstream os(out.file("trace.csv"));
      write_trace_csv(os, trace);
    }
    out.finish();
  });
}

}  // namespace cellwave::cli
