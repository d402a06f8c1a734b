#pragma once

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "config.hpp"

namespace cellwave::cli {

/// Options shared by every subcommand.
struct Globals {
  std::string out;     // run directory; default $CELLWAVE_OUT/<name> or runs/<name>
  unsigned jobs = 0;   // 0 = all cores
  std::vector<std::string> argv;
};

/// Command-line flags that map onto ExperimentConfig keys. Only flags the
/// user actually passed end up in the patch, so they override lower layers.
class ConfigFlags {
 public:
  /// `c1_shortcut` is false for subcommands that use --c1 for something else.
  void add(CLI::App& app, bool c1_shortcut = true);

  /// preset defaults < `base` < --config file < flags.
  ExperimentConfig resolve(const json& base = json::object()) const;
  json patch() const;

 private:
  std::string config_file_;
  std::optional<std::string> preset_, model_, scheme_, variant_;
  std::vector<std::string> set_;
  std::map<std::string, std::optional<double>> shortcuts_;  // parameter or diffusion shortcuts
  std::optional<double> L_, dt_, T_, sigma_, omega_;
  std::optional<std::size_t> n_;
  std::optional<std::uint64_t> stride_, seed_;
  std::vector<std::string> init_;
};

/// A run directory with a manifest written on finish().
class RunOutput {
 public:
  RunOutput(const Globals& g, const std::string& default_name);

  const std::filesystem::path& dir() const { return dir_; }
  /// Path of a file inside the run directory, recorded in the manifest.
  std::filesystem::path file(const std::string& name);
  void warn(const std::string& message);
  json& manifest() { return manifest_; }
  void finish();

 private:
  std::filesystem::path dir_;
  json manifest_;
  std::vector<std::string> outputs_;
  std::vector<std::string> warnings_;
  std::chrono::steady_clock::time_point start_;
};

std::string version();

/// Writes `j` with two-space indentation and a trailing newline.
void write_json(const std::filesystem::path& path, const json& j);

/// Config stored in manifest.json next to a trace, or an empty object.
json manifest_config_near(const std::filesystem::path& trace);

}  // namespace cellwave::cli
