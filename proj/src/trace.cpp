#include "cellwave/trace.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <ostream>

#include "cellwave/error.hpp"

static_assert(std::endian::native == std::endian::little, "trace IO assumes a little-endian host");

namespace cellwave {

namespace {

constexpr char kMagic[8] = {'R', 'D', 'S', 'T', 'R', 'A', 'C', 'E'};
constexpr std::uint32_t kVersion = 1;

constexpr std::array<std::pair<Scheme, std::string_view>, 3> kSchemes{
    {{Scheme::Rde, "rde"}, {Scheme::Cle, "cle"}, {Scheme::Ssa, "ssa"}}};
constexpr std::array<std::pair<NoiseVariant, std::string_view>, 5> kVariants{
    {{NoiseVariant::None, "none"},
     {NoiseVariant::FullCleFormA, "full_cle_formA"},
     {NoiseVariant::FullCleFormB, "full_cle_formB"},
     {NoiseVariant::CleNoDiffusionNoise, "cle_no_diffusion_noise"},
     {NoiseVariant::AdditiveWhiteU, "additive_white_u"}}};

template <class T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::istream& is) {
  T v{};
  if (!is.read(reinterpret_cast<char*>(&v), sizeof v)) throw ConfigError("truncated trace file");
  return v;
}

}  // namespace

std::string_view scheme_name(Scheme s) {
  for (const auto& [k, n] : kSchemes)
    if (k == s) return n;
  return "?";
}

std::string_view variant_name(NoiseVariant v) {
  for (const auto& [k, n] : kVariants)
    if (k == v) return n;
  return "?";
}

Scheme parse_scheme(std::string_view name) {
  for (const auto& [k, n] : kSchemes)
    if (n == name) return k;
  throw ConfigError("unknown scheme '" + std::string(name) + "' (rde, cle, ssa)");
}

NoiseVariant parse_variant(std::string_view name) {
  for (const auto& [k, n] : kVariants)
    if (n == name) return k;
  throw ConfigError("unknown noise variant '" + std::string(name) + "'");
}

Grid1D::Grid1D(double length, std::size_t n_points) : length_(length), n_(n_points) {
  if (!(length > 0.0) || !std::isfinite(length)) throw ConfigError("grid length must be positive");
  if (n_points < 8) throw ConfigError("grid needs at least 8 points");
}

void SimulationTrace::append(double t, std::span<const double> values) {
  if (values.size() != species_count() * points())
    throw ConfigError("snapshot size does not match the trace grid");
  if (!times_.empty() && !(t > times_.back()))
    throw ConfigError("snapshot times must be strictly increasing");
  times_.push_back(t);
  data_.insert(data_.end(), values.begin(), values.end());
}

FieldState SimulationTrace::state(std::size_t i) const {
  FieldState s(species_count(), points(), times_.at(i));
  const auto snap = snapshot(i);
  std::copy(snap.begin(), snap.end(), s.values.begin());
  return s;
}

void write_trace(std::ostream& os, const SimulationTrace& trace) {
  const TraceMeta& m = trace.meta();
  os.write(kMagic, sizeof kMagic);
  put<std::uint32_t>(os, kVersion);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(m.scheme));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(m.variant));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(m.species.size()));
  put<std::uint64_t>(os, m.grid.size());
  put<double>(os, m.grid.length());
  put<double>(os, m.dt);
  put<std::uint64_t>(os, m.stride);
  put<double>(os, m.sigma);
  put<double>(os, m.omega);
  put<std::uint64_t>(os, m.seed);
  put<std::uint64_t>(os, trace.snapshot_count());
  for (const auto& name : m.species) {
    put<std::uint32_t>(os, static_cast<std::uint32_t>(name.size()));
    os.write(name.data(), static_cast<std::streamsize>(name.size()));
  }
  for (std::size_t i = 0; i < trace.snapshot_count(); ++i) {
    put<double>(os, trace.times()[i]);
    const auto snap = trace.snapshot(i);
    os.write(reinterpret_cast<const char*>(snap.data()),
             static_cast<std::streamsize>(snap.size() * sizeof(double)));
  }
  if (!os) throw ConfigError("failed writing trace");
}

void write_trace(const std::filesystem::path& path, const SimulationTrace& trace) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot create " + path.string());
  write_trace(os, trace);
}

SimulationTrace read_trace(std::istream& is) {
  char magic[8];
  if (!is.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof magic) != 0)
    throw ConfigError("not a trace file (bad magic)");
  if (get<std::uint32_t>(is) != kVersion) throw ConfigError("unsupported trace version");
  TraceMeta m;
  m.scheme = static_cast<Scheme>(get<std::uint32_t>(is));
  m.variant = static_cast<NoiseVariant>(get<std::uint32_t>(is));
  const auto species = get<std::uint32_t>(is);
  const auto n = get<std::uint64_t>(is);
  const auto length = get<double>(is);
  m.grid = Grid1D(length, n);
  m.dt = get<double>(is);
  m.stride = get<std::uint64_t>(is);
  m.sigma = get<double>(is);
  m.omega = get<double>(is);
  m.seed = get<std::uint64_t>(is);
  const auto count = get<std::uint64_t>(is);
  for (std::uint32_t s = 0; s < species; ++s) {
    const auto len = get<std::uint32_t>(is);
    if (len > 4096) throw ConfigError("corrupt species name in trace");
    std::string name(len, '\0');
    if (!is.read(name.data(), len)) throw ConfigError("truncated trace file");
    m.species.push_back(std::move(name));
  }
  SimulationTrace trace(std::move(m));
  std::vector<double> buf(species * n);
  for (std::uint64_t i = 0; i < count; ++i) {
    const double t = get<double>(is);
    if (!is.read(reinterpret_cast<char*>(buf.data()),
                 static_cast<std::streamsize>(buf.size() * sizeof(double))))
      throw ConfigError("truncated trace file");
    trace.append(t, buf);
  }
  return trace;
}

SimulationTrace read_trace(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot open trace " + path.string());
  return read_trace(is);
}

void write_trace_csv(std::ostream& os, const SimulationTrace& trace) {
  const auto old = os.precision(std::numeric_limits<double>::max_digits10);
  os << "t,x,species,value\n";
  const auto& g = trace.meta().grid;
  for (std::size_t i = 0; i < trace.snapshot_count(); ++i)
    for (std::size_t s = 0; s < trace.species_count(); ++s) {
      const auto f = trace.field(i, s);
      for (std::size_t k = 0; k < f.size(); ++k)
        os << trace.times()[i] << ',' << g.x(k) << ',' << trace.meta().species[s] << ',' << f[k] << '\n';
    }
  os.precision(old);
}

}  // namespace cellwave
