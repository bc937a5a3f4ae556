#include <benchmark/benchmark.h>

#include "ghostsim/analysis.hpp"
#include "ghostsim/montecarlo.hpp"
#include "ghostsim/wave_optics.hpp"

namespace {

ghostsim::BiphotonState reference_state() {
  ghostsim::CrystalSpec crystal;
  crystal.length_um = 3000.0;
  crystal.pump_wavelength_um = 0.355;
  return ghostsim::build_state(crystal, ghostsim::PumpSpec{450.0});
}

void BM_SamplePairs(benchmark::State& state) {
  const auto bi = reference_state();
  const auto n = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) {
    auto pairs = ghostsim::sample_pairs(bi, n, 42);
    benchmark::DoNotOptimize(pairs.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(n));
}
BENCHMARK(BM_SamplePairs)->Arg(1 << 16)->Arg(1 << 20);

void BM_RunPlaneNearField(benchmark::State& state) {
  ghostsim::ExperimentConfig config;
  config.state = reference_state();
  config.slit = ghostsim::SlitAperture{10.0, 0.0};
  config.plane = ghostsim::PropagationSpec::free_space(0.0);
  config.n_pairs = static_cast<std::uint64_t>(state.range(0));
  config.seed = 42;
  for (auto _ : state) {
    auto result = ghostsim::run_plane(config);
    benchmark::DoNotOptimize(result.triggers);
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          state.range(0));
}
BENCHMARK(BM_RunPlaneNearField)->Arg(1 << 18)->Arg(1 << 20);

void BM_FresnelPropagate(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  ghostsim::ComplexField field;
  field.x0 = -0.5 * static_cast<double>(n);
  field.dx = 1.0;
  field.wavelength = 0.710;
  field.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = field.x(i) / 9.2041;
    field.samples[i] = std::exp(-u * u / 4.0);
  }
  for (auto _ : state) {
    auto out = ghostsim::fresnel_propagate(field, 500.0);
    benchmark::DoNotOptimize(out.samples.data());
  }
}
BENCHMARK(BM_FresnelPropagate)->Arg(1 << 12)->Arg(1 << 16);

void BM_EstimateSd(benchmark::State& state) {
  ghostsim::ExperimentConfig config;
  config.state = reference_state();
  config.slit = ghostsim::SlitAperture{10.0, 0.0};
  config.plane = ghostsim::PropagationSpec::free_space(0.0);
  config.n_pairs = 1 << 20;
  config.seed = 42;
  const auto result = ghostsim::run_plane(config);
  for (auto _ : state) {
    auto est = ghostsim::estimate_sd_ci(result.all_singles);
    benchmark::DoNotOptimize(est.sd);
  }
}
BENCHMARK(BM_EstimateSd);

}  // namespace

BENCHMARK_MAIN();
