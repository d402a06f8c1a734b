#include "config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "cellwave/equilibrium.hpp"
#include "cellwave/error.hpp"
#include "cellwave/model_io.hpp"
#include "cellwave/rde.hpp"

namespace cellwave::cli {

json to_json(const ExperimentConfig& c) {
  json j;
  j["preset"] = c.preset;
  j["model"] = c.model ? json(c.model->string()) : json(nullptr);
  j["parameters"] = c.parameters;
  j["diffusion"] = c.diffusion;
  j["L"] = c.L;
  j["n"] = c.n;
  j["dt"] = c.dt;
  j["T"] = c.T;
  j["stride"] = c.stride;
  j["scheme"] = std::string(scheme_name(c.scheme));
  j["variant"] = std::string(variant_name(c.variant));
  j["sigma"] = c.sigma;
  j["omega"] = c.omega;
  j["seed"] = c.seed;
  j["init"] = c.init;
  return j;
}

namespace {

template <class T>
T get(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

}  // namespace

ExperimentConfig config_from_json(const json& j) {
  static const std::set<std::string> known{"preset", "model", "parameters", "diffusion", "L", "n", "dt", "T",
                                           "stride", "scheme", "variant", "sigma", "omega", "seed", "init"};
  require(j.is_object(), "config must be a JSON object");
  for (const auto& [k, v] : j.items()) require(known.contains(k), "unknown config key '" + k + "'");

  ExperimentConfig c;
  const json full = merge(to_json(c), j);
  c.preset = get<std::string>(full, "preset");
  if (!full["model"].is_null()) c.model = get<std::string>(full, "model");
  c.parameters = get<std::map<std::string, double>>(full, "parameters");
  c.diffusion = get<std::map<std::string, double>>(full, "diffusion");
  c.L = get<double>(full, "L");
  c.n = get<std::size_t>(full, "n");
  c.dt = get<double>(full, "dt");
  c.T = get<double>(full, "T");
  c.stride = get<std::uint64_t>(full, "stride");
  c.scheme = parse_scheme(get<std::string>(full, "scheme"));
  c.variant = parse_variant(get<std::string>(full, "variant"));
  c.sigma = get<double>(full, "sigma");
  c.omega = get<double>(full, "omega");
  c.seed = get<std::uint64_t>(full, "seed");
  c.init = get<std::vector<std::string>>(full, "init");

  require(c.L > 0.0 && std::isfinite(c.L), "L must be positive");
  require(c.n >= 8, "n must be at least 8");
  require(c.dt > 0.0 && std::isfinite(c.dt), "dt must be positive");
  require(c.T > 0.0 && std::isfinite(c.T), "T must be positive");
  require(c.stride >= 1, "stride must be at least 1");
  require(c.sigma >= 0.0 && std::isfinite(c.sigma), "sigma must be non-negative");
  require(c.omega >= 0.0 && std::isfinite(c.omega), "omega must be non-negative");
  if (c.scheme == Scheme::Ssa) require(c.omega > 0.0, "the ssa scheme needs --omega > 0");
  if (c.model) require(std::filesystem::exists(*c.model), "model file not found: " + c.model->string());
  return c;
}

json merge(json base, const json& patch) {
  base.merge_patch(patch);
  return base;
}

json load_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::vector<std::string> preset_names() { return {"bhatt_baseline", "bhatt_wt", "bhatt_pten"}; }

ReactionNetwork preset_network(const std::string& name) {
  if (name == "bhatt_baseline") return builtin_bhatt_model(ModelParameters::baseline());
  if (name == "bhatt_wt") return builtin_bhatt_model(ModelParameters::wild_type());
  if (name == "bhatt_pten") return builtin_bhatt_model(ModelParameters::pten_null());
  throw ConfigError("unknown preset '" + name + "' (bhatt_baseline, bhatt_wt, bhatt_pten)");
}

ReactionNetwork build_network(const ExperimentConfig& c) {
  const ReactionNetwork base = c.model ? load_model_file(*c.model) : preset_network(c.preset);
  if (c.parameters.empty() && c.diffusion.empty()) return base;

  auto params = base.parameters();
  for (const auto& [k, v] : c.parameters) {
    require(params.contains(k), "model has no parameter '" + k + "'");
    params[k] = v;
  }
  auto species = base.species();
  for (const auto& [k, v] : c.diffusion) {
    species.at(base.species_index(k)).diffusion = v;
  }
  return ReactionNetwork(std::move(species), base.reactions(), std::move(params));
}

std::map<std::string, double> background_symbols(const ReactionNetwork& net) {
  try {
    const auto states = background_states(bhatt_parameters(net));
    if (states.empty()) return {};
    return {{"u_star", states.front().u_star}, {"v_star", states.front().v_star}};
  } catch (const ModelError&) {
    return {};
  }
}

FieldState build_initial(const ReactionNetwork& net, const ExperimentConfig& c) {
  const auto extra = background_symbols(net);
  std::vector<std::string> exprs = c.init;
  if (exprs.empty()) {
    require(extra.contains("u_star") && net.species_count() == 2,
            "this model has no default initial condition; pass one --init expression per species");
    exprs = {"u_star", "4*v_star"};
  }
  return initial_state(net, c.grid(), exprs, extra);
}

std::vector<std::string> sanity_warnings(const ReactionNetwork& net, const ExperimentConfig& c) {
  std::vector<std::string> out;
  try {
    const auto p = bhatt_parameters(net);
    const auto states = background_states(p);
    if (states.empty()) return out;
    const auto ev = eigenvalues(jacobian(p, states.front().u_star, states.front().v_star));
    const double rate = std::max(std::abs(ev[0]), std::abs(ev[1]));
    if (c.dt * rate > 0.5)
      out.push_back("dt * max|lambda| = " + std::to_string(c.dt * rate) + " at the background state; dt may be too large");
  } catch (const ModelError&) {
  }
  return out;
}

}  // namespace cellwave::cli
