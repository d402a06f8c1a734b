#include "common.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>

#include <omp.h>

#include "cellwave/error.hpp"

#ifndef CELLWAVE_VERSION
#define CELLWAVE_VERSION "unknown"
#endif

namespace cellwave::cli {

namespace {

// shortcut flag -> (config section, key)
const std::vector<std::tuple<std::string, std::string, std::string>> kShortcuts{
    {"a1", "parameters", "a1"}, {"a2", "parameters", "a2"}, {"a3", "parameters", "a3"},
    {"a4", "parameters", "a4"}, {"a5", "parameters", "a5"}, {"eps", "parameters", "eps"},
    {"c1", "parameters", "c1"}, {"c2", "parameters", "c2"}, {"Du", "diffusion", "u"},
    {"Dv", "diffusion", "v"}};

}  // namespace

void ConfigFlags::add(CLI::App& app, bool c1_shortcut) {
  app.add_option("--config", config_file_, "JSON config file (flags override it)")->check(CLI::ExistingFile);
  app.add_option("--preset", preset_, "Builtin model: bhatt_baseline, bhatt_wt, bhatt_pten");
  app.add_option("--model", model_, "Model file (.model); replaces the preset");
  app.add_option("--set", set_, "Override a model parameter, name=value; D_<species>=value sets diffusion");
  for (const auto& [flag, section, key] : kShortcuts) {
    if (flag == "c1" && !c1_shortcut) continue;
    app.add_option("--" + flag, shortcuts_[flag], "Set " + (section == "diffusion" ? "diffusion of " + key : key));
  }
  app.add_option("--L", L_, "Domain length; the grid is [-L/2, L/2)");
  app.add_option("--n", n_, "Grid points");
  app.add_option("--dt", dt_, "Time step");
  app.add_option("--T", T_, "Final time");
  app.add_option("--stride", stride_, "Steps between snapshots");
  app.add_option("--scheme", scheme_, "rde, cle or ssa");
  app.add_option("--variant", variant_,
                 "Noise: full_cle_formA, full_cle_formB, cle_no_diffusion_noise, additive_white_u, none");
  app.add_option("--sigma", sigma_, "Noise amplitude (cle)");
  app.add_option("--omega", omega_, "Molecules per unit concentration per cell (ssa)");
  app.add_option("--seed", seed_, "Random seed");
  app.add_option("--init", init_, "Initial condition, one expression in x per species (u_star, v_star, L available)");
}

json ConfigFlags::patch() const {
  json p = json::object();
  if (preset_) {
    p["preset"] = *preset_;
    p["model"] = nullptr;
  }
  if (model_) p["model"] = *model_;
  for (const auto& [flag, section, key] : kShortcuts) {
    const auto it = shortcuts_.find(flag);
    if (it != shortcuts_.end() && it->second) p[section][key] = *it->second;
  }
  for (const auto& s : set_) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("--set expects name=value, got '" + s + "'");
    const std::string name = s.substr(0, eq);
    double value = 0.0;
    try {
      std::size_t used = 0;
      value = std::stod(s.substr(eq + 1), &used);
      if (used != s.size() - eq - 1) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw ConfigError("--set " + s + ": value is not a number");
    }
    if (name.starts_with("D_"))
      p["diffusion"][name.substr(2)] = value;
    else
      p["parameters"][name] = value;
  }
  if (L_) p["L"] = *L_;
  if (n_) p["n"] = *n_;
  if (dt_) p["dt"] = *dt_;
  if (T_) p["T"] = *T_;
  if (stride_) p["stride"] = *stride_;
  if (scheme_) p["scheme"] = *scheme_;
  if (variant_) p["variant"] = *variant_;
  if (sigma_) p["sigma"] = *sigma_;
  if (omega_) p["omega"] = *omega_;
  if (seed_) p["seed"] = *seed_;
  if (!init_.empty()) p["init"] = init_;
  return p;
}

ExperimentConfig ConfigFlags::resolve(const json& base) const {
  json layered = base.is_object() ? base : json::object();
  if (!config_file_.empty()) layered = merge(layered, load_json_file(config_file_));
  return config_from_json(merge(layered, patch()));
}

RunOutput::RunOutput(const Globals& g, const std::string& default_name) : start_(std::chrono::steady_clock::now()) {
  if (!g.out.empty()) {
    dir_ = g.out;
  } else {
    const char* root = std::getenv("CELLWAVE_OUT");
    dir_ = std::filesystem::path(root && *root ? root : "runs") / default_name;
  }
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir_.string() + ": " + ec.message());
  if (g.jobs > 0) omp_set_num_threads(static_cast<int>(g.jobs));
  manifest_["version"] = version();
  manifest_["command"] = g.argv;
}

std::filesystem::path RunOutput::file(const std::string& name) {
  outputs_.push_back(name);
  return dir_ / name;
}

void RunOutput::warn(const std::string& message) {
  std::cerr << "warning: " << message << '\n';
  warnings_.push_back(message);
}

void RunOutput::finish() {
  manifest_["outputs"] = outputs_;
  manifest_["warnings"] = warnings_;
  manifest_["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  write_json(dir_ / "manifest.json", manifest_);
  std::cout << dir_.string() << '\n';
}

std::string version() { return CELLWAVE_VERSION; }

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot create " + path.string());
  os << j.dump(2) << '\n';
}

json manifest_config_near(const std::filesystem::path& trace) {
  const auto m = trace.parent_path() / "manifest.json";
  if (!std::filesystem::exists(m)) return json::object();
  const json j = load_json_file(m);
  return j.contains("config") ? j["config"] : json::object();
}

}  // namespace cellwave::cli
