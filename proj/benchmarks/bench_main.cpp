#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "ccbench/color.hpp"
#include "ccbench/estimators.hpp"
#include "ccbench/stats.hpp"
#include "ccbench/synth.hpp"

using namespace ccbench;

namespace {

Image mondrian(std::size_t side) {
  SynthConfig cfg;
  cfg.width = cfg.height = side;
  cfg.seed = 11;
  cfg.noise_sigma = 0.01;
  cfg.illuminants = {Illuminant(0.9, 1.0, 0.6)};
  return render(generate_scene(cfg), cfg).observed;
}

void BM_GaussianSmooth(benchmark::State& state) {
  const Image img = mondrian(static_cast<std::size_t>(state.range(0)));
  const double sigma = static_cast<double>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(gaussian_smooth(img, sigma));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(img.pixel_count()));
}
BENCHMARK(BM_GaussianSmooth)->Args({64, 2})->Args({256, 2})->Args({256, 5});

void BM_Estimate(benchmark::State& state) {
  const Image img = mondrian(256);
  const auto preset = all_presets()[static_cast<std::size_t>(state.range(0))];
  state.SetLabel(std::string(to_string(preset)));
  for (auto _ : state) benchmark::DoNotOptimize(estimate_preset(img, preset));
}
BENCHMARK(BM_Estimate)->DenseRange(0, 5);

void BM_RecoverIlluminant(benchmark::State& state) {
  SynthConfig cfg;
  cfg.width = cfg.height = 256;
  cfg.illuminants = {Illuminant(0.9, 1.0, 0.6)};
  const SynthSample s = render(generate_scene(cfg), cfg);
  const auto agg = state.range(0) ? Aggregator::Mean : Aggregator::Median;
  for (auto _ : state) benchmark::DoNotOptimize(recover_illuminant(s.observed, s.canonical, agg));
}
BENCHMARK(BM_RecoverIlluminant)->Arg(0)->Arg(1);

void BM_Summarize(benchmark::State& state) {
  std::mt19937_64 gen(3);
  std::exponential_distribution<double> err(0.2);
  std::vector<double> v(static_cast<std::size_t>(state.range(0)));
  for (double& x : v) x = err(gen);
  for (auto _ : state) benchmark::DoNotOptimize(summarize(v));
}
BENCHMARK(BM_Summarize)->Arg(100)->Arg(10000);

}  // namespace

BENCHMARK_MAIN();
