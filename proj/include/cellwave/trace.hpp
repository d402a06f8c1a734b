#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cellwave/grid.hpp"

namespace cellwave {

enum class Scheme : std::uint32_t { Rde = 0, Cle = 1, Ssa = 2 };

enum class NoiseVariant : std::uint32_t {
  None = 0,
  FullCleFormA = 1,         // one channel per reaction plus diffusion noise
  FullCleFormB = 2,         // one channel per species plus diffusion noise
  CleNoDiffusionNoise = 3,  // form B reaction noise only
  AdditiveWhiteU = 4,       // white noise on the activator only
};

std::string_view scheme_name(Scheme s);
std::string_view variant_name(NoiseVariant v);
Scheme parse_scheme(std::string_view name);          // throws ConfigError
NoiseVariant parse_variant(std::string_view name);   // throws ConfigError

struct TraceMeta {
  Scheme scheme = Scheme::Rde;
  NoiseVariant variant = NoiseVariant::None;
  Grid1D grid;
  double dt = 0.0;
  std::uint64_t stride = 1;
  double sigma = 0.0;
  double omega = 0.0;  // SSA system size, 0 otherwise
  std::uint64_t seed = 0;
  std::vector<std::string> species;

  friend bool operator==(const TraceMeta&, const TraceMeta&) = default;
};

/// Snapshots of every species at strictly increasing times.
class SimulationTrace {
 public:
  SimulationTrace() = default;
  explicit SimulationTrace(TraceMeta meta) : meta_(std::move(meta)) {}

  const TraceMeta& meta() const { return meta_; }
  std::size_t species_count() const { return meta_.species.size(); }
  std::size_t points() const { return meta_.grid.size(); }
  std::size_t snapshot_count() const { return times_.size(); }
  const std::vector<double>& times() const { return times_; }

  /// Appends a snapshot (species-major, species_count()*points() values).
  void append(double t, std::span<const double> values);

  std::span<const double> snapshot(std::size_t i) const {
    const std::size_t w = species_count() * points();
    return {data_.data() + i * w, w};
  }
  std::span<const double> field(std::size_t i, std::size_t species) const {
    return snapshot(i).subspan(species * points(), points());
  }
  FieldState state(std::size_t i) const;

  friend bool operator==(const SimulationTrace&, const SimulationTrace&) = default;

 private:
  TraceMeta meta_;
  std::vector<double> times_;
  std::vector<double> data_;
};

/// Binary container, little-endian:
///   "RDSTRACE" u32 version=1, u32 scheme, u32 variant, u32 M, u64 n,
///   f64 L, f64 dt, u64 stride, f64 sigma, f64 omega, u64 seed, u64 snapshots,
///   M x (u32 length, bytes) species names,
///   snapshots x (f64 t, M*n f64 species-major values).
void write_trace(std::ostream& os, const SimulationTrace& trace);
void write_trace(const std::filesystem::path& path, const SimulationTrace& trace);
SimulationTrace read_trace(std::istream& is);  // throws ConfigError on malformed input
SimulationTrace read_trace(const std::filesystem::path& path);

/// Long format: t,x,species,value.
void write_trace_csv(std::ostream& os, const SimulationTrace& trace);

}  // namespace cellwave
