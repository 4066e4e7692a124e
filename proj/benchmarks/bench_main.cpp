#include <benchmark/benchmark.h>

#include <numbers>

#include "rydcav/bloch.hpp"
#include "rydcav/experiment.hpp"
#include "rydcav/fitting.hpp"
#include "rydcav/rabi_model.hpp"
#include "rydcav/resonator.hpp"
#include "rydcav/units.hpp"

using namespace rydcav;
using namespace rydcav::units;

namespace {

const ResonatorMode kMode{angular(19556.119 * kMHz), 2470};
const AtomParams kAtom = AtomParams::with_dephasing(angular(39112.998 * kMHz),
                                                    2.0 * std::numbers::pi * 6e6, 0.84e-6);
constexpr double kCarrier = 2.0 * std::numbers::pi * 19556.499e6;

RamseyConfig ramsey_config(double step_hz) {
  RamseyConfig cfg;
  cfg.drive_amplitude = 6.3e18;
  cfg.frequency_grid = frequency_grid(kCarrier, angular(6 * kMHz), angular(step_hz));
  return cfg;
}

void BM_SimulateField(benchmark::State& state) {
  const auto seq = ramsey_pair(kCarrier, 50e-9, 100e-9, 6.3e18);
  for (auto _ : state) benchmark::DoNotOptimize(simulate_field(kMode, seq));
}
BENCHMARK(BM_SimulateField);

void BM_EvolveFinal(benchmark::State& state) {
  const auto field = simulate_field(kMode, ramsey_pair(kCarrier, 50e-9, 100e-9, 6.3e18));
  for (auto _ : state) benchmark::DoNotOptimize(evolve_final(kAtom, field));
}
BENCHMARK(BM_EvolveFinal);

void BM_RamseyPoint(benchmark::State& state) {
  const auto cfg = ramsey_config(50e3);
  for (auto _ : state) benchmark::DoNotOptimize(simulate_ramsey_point(kAtom, kMode, cfg, kCarrier));
}
BENCHMARK(BM_RamseyPoint);

void BM_RamseySpectrum(benchmark::State& state) {
  const auto cfg = ramsey_config(50e3);
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(simulate_ramsey_spectrum(kAtom, kMode, cfg, threads));
}
BENCHMARK(BM_RamseySpectrum)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_RabiPopulation(benchmark::State& state) {
  const RabiParams p{angular(1.57 * kMHz), angular(-0.54 * kMHz), 0.84e-6};
  double t = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(rabi_population(t, p));
    t = t < 1e-6 ? t + 1e-9 : 0.0;
  }
}
BENCHMARK(BM_RabiPopulation);

void BM_FitRabi(benchmark::State& state) {
  const RabiParams truth{angular(1.57 * kMHz), angular(0.54 * kMHz), 0.84e-6};
  std::vector<double> durations;
  for (int i = 1; i <= 40; ++i) durations.push_back(i * 25e-9);
  const auto trace = generate_synthetic_rabi(truth, durations, 0.03, 3);
  const RabiParams guess{angular(1.4 * kMHz), angular(0.8 * kMHz), 0.6e-6};
  for (auto _ : state) benchmark::DoNotOptimize(fit_rabi(trace, guess));
}
BENCHMARK(BM_FitRabi)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
