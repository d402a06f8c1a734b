// Serial reference vs OpenMP blocked step kernel.
//   bench_kernels [--n N] [--steps S] [--threads T]
#include <chrono>
#include <cstdio>
#include <string>

#include <CLI11.hpp>
#include <omp.h>

#include "cellwave/equilibrium.hpp"
#include "cellwave/rde.hpp"

using namespace cellwave;

namespace {

template <class F>
double seconds(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
  std::size_t n = 1024;
  std::uint64_t steps = 2000;
  int threads = 0;
  CLI::App app{"Serial reference against the OpenMP step kernel"};
  app.add_option("--n", n, "Grid points")->check(CLI::Range(8, 1 << 24))->capture_default_str();
  app.add_option("--steps", steps, "Steps per variant")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--threads", threads, "OpenMP threads (0: runtime default)")->capture_default_str();
  CLI11_PARSE(app, argc, argv);
  if (threads > 0) omp_set_num_threads(threads);

  const auto p = ModelParameters::baseline();
  const auto net = builtin_bhatt_model(p);
  const Grid1D grid(40.0, n);
  const auto bg = background_states(p).front();
  const std::string ic[] = {"u_star + exp(-x^2)", "4*v_star"};
  const auto init = initial_state(net, grid, ic, {{"u_star", bg.u_star}, {"v_star", bg.v_star}});

  std::printf("n=%zu steps=%llu threads=%d\n", n, static_cast<unsigned long long>(steps), omp_get_max_threads());
  std::printf("%-24s %12s %12s %8s\n", "variant", "serial us", "omp us", "speedup");
  for (auto v : {NoiseVariant::None, NoiseVariant::FullCleFormB, NoiseVariant::FullCleFormA,
                 NoiseVariant::CleNoDiffusionNoise, NoiseVariant::AdditiveWhiteU}) {
    Stepper st(net, grid, 1e-3, {v, 0.04, 7});
    auto a = init.values, b = init.values;
    const double ts = seconds([&] {
      for (std::uint64_t i = 0; i < steps; ++i) st.step_reference(a, i);
    });
    const double tp = seconds([&] {
      for (std::uint64_t i = 0; i < steps; ++i) st.step(b, i);
    });
    std::printf("%-24s %12.2f %12.2f %8.2f%s\n", std::string(variant_name(v)).c_str(), 1e6 * ts / steps,
                1e6 * tp / steps, ts / tp, a == b ? "" : "  MISMATCH");
  }
  return 0;
}
