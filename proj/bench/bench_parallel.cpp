// Serial vs OpenMP timings for the grid-parallel operations. The serial
// paths double as the reference the unit tests compare against.
#include <benchmark/benchmark.h>

#include <thread>

#include "econet/lda.hpp"
#include "econet/sharesim.hpp"
#include "econet/synth.hpp"

namespace {

using namespace econet;

SynthResult bench_net() {
  SynthSpec spec;
  spec.I = 120;
  spec.J = 50;
  spec.K_true = 4;
  spec.alpha_true = {0.05};
  spec.beta_true = {0.05};
  spec.tokens_min = 12;
  spec.tokens_max = 24;
  spec.seed = 99;
  return generate(spec);
}

LdaConfig bench_config() {
  LdaConfig cfg;
  cfg.iterations = 120;
  cfg.burn_in = 60;
  cfg.seed = 7;
  return cfg;
}

void bm_select_k(benchmark::State& state) {
  const auto synth = bench_net();
  const int jobs = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto result = select_k(synth.net, {2, 4, 6, 8}, 3, 0.1, bench_config(), jobs);
    benchmark::DoNotOptimize(result.selected_K);
  }
}

void bm_simulate(benchmark::State& state) {
  const auto synth = bench_net();
  auto cfg = bench_config();
  cfg.K = 4;
  const auto model = fit(synth.net, cfg);
  const int jobs = static_cast<int>(state.range(0));
  std::vector<int> n_values;
  for (int n = 1; n <= 12; ++n) n_values.push_back(n);
  for (auto _ : state) {
    ShareSimOptions opts;
    opts.pairs_per_n = 4000;
    opts.seed = 11;
    opts.jobs = jobs;
    auto curve = simulate_share_curve(model, n_values, opts);
    benchmark::DoNotOptimize(curve.within.data());
  }
}

const int hw = static_cast<int>(std::thread::hardware_concurrency());

}  // namespace

BENCHMARK(bm_select_k)->Arg(1)->Arg(hw > 1 ? hw : 2)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_simulate)->Arg(1)->Arg(hw > 1 ? hw : 2)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
