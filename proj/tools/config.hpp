#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cellwave/grid.hpp"
#include "cellwave/network.hpp"
#include "cellwave/trace.hpp"

namespace cellwave::cli {

using json = nlohmann::ordered_json;

/// Everything a single run needs. Built in layers: preset defaults, then a
/// JSON config file, then command-line flags.
struct ExperimentConfig {
  std::string preset = "bhatt_baseline";
  std::optional<std::filesystem::path> model;   // replaces the preset when set
  std::map<std::string, double> parameters;     // overrides of network parameters
  std::map<std::string, double> diffusion;      // per-species diffusion overrides
  double L = 40.0;
  std::size_t n = 1024;
  double dt = 1e-3;
  double T = 100.0;
  std::uint64_t stride = 100;
  Scheme scheme = Scheme::Rde;
  NoiseVariant variant = NoiseVariant::FullCleFormB;
  double sigma = 0.0;
  double omega = 0.0;
  std::uint64_t seed = 1;
  std::vector<std::string> init;  // one expression per species; empty = default

  Grid1D grid() const { return Grid1D(L, n); }
};

json to_json(const ExperimentConfig& c);
ExperimentConfig config_from_json(const json& j);  // throws ConfigError on unknown keys or bad values

/// Shared helper for layering: RFC 7386 merge patch of `patch` onto `base`.
json merge(json base, const json& patch);

json load_json_file(const std::filesystem::path& path);

/// Preset or model file with parameter and diffusion overrides applied.
ReactionNetwork build_network(const ExperimentConfig& c);

std::vector<std::string> preset_names();
ReactionNetwork preset_network(const std::string& name);

/// u_star, v_star of the smallest background state when the network has the
/// two-species parameterisation; empty otherwise.
std::map<std::string, double> background_symbols(const ReactionNetwork& net);

/// Initial fields: the configured expressions, or (u*, 4 v*) by default.
FieldState build_initial(const ReactionNetwork& net, const ExperimentConfig& c);

/// Heuristic warnings: dt times the fastest reaction rate at the background
/// state. Diffusion is implicit and never limits dt.
std::vector<std::string> sanity_warnings(const ReactionNetwork& net, const ExperimentConfig& c);

}  // namespace cellwave::cli
