#include <benchmark/benchmark.h>

#include "dosefind/beta.hpp"
#include "dosefind/scenarios.hpp"
#include "dosefind/trial.hpp"

using namespace dosefind;

static void BM_BetaCdf(benchmark::State& state) {
  const BetaParams p{static_cast<double>(state.range(0)), 37.0 - state.range(0)};
  double x = 0.01;
  for (auto _ : state) {
    benchmark::DoNotOptimize(beta_cdf(x, p));
    x = x < 0.98 ? x + 0.01 : 0.01;
  }
}
BENCHMARK(BM_BetaCdf)->Arg(1)->Arg(4)->Arg(13)->Arg(30);

static void BM_BetaQuantile(benchmark::State& state) {
  const BetaParams p{4, 10};
  double u = 0.01;
  for (auto _ : state) {
    benchmark::DoNotOptimize(beta_quantile(u, p));
    u = u < 0.98 ? u + 0.01 : 0.01;
  }
}
BENCHMARK(BM_BetaQuantile);

static void BM_BetaSample(benchmark::State& state) {
  RngStream rng(1, 1);
  const BetaParams p{3, 7};
  for (auto _ : state) benchmark::DoNotOptimize(beta_sample(p, rng));
}
BENCHMARK(BM_BetaSample);

static void BM_BetaSampleTruncated(benchmark::State& state) {
  RngStream rng(1, 2);
  const BetaParams p = BetaParams::posterior(12, 4);
  const double eps = state.range(0) / 100.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(beta_sample_truncated(p, 1.0 / 3.0 - eps, 1.0 / 3.0 + eps, rng));
  }
}
BENCHMARK(BM_BetaSampleTruncated)->Arg(1)->Arg(5)->Arg(10);

static void BM_SimulateTrial(benchmark::State& state, const char* label) {
  DesignParams p = with_design(DesignParams{}, label);
  p.early_stopping = false;
  const Design design(p);
  const auto tox = builtin_scenarios()[0].true_tox;
  std::uint64_t r = 0;
  for (auto _ : state) {
    RngStream rng(20240101, r++);
    benchmark::DoNotOptimize(simulate_trial(design, tox, rng));
  }
}
BENCHMARK_CAPTURE(BM_SimulateTrial, boin, "boin");
BENCHMARK_CAPTURE(BM_SimulateTrial, keyboard, "keyboard");
BENCHMARK_CAPTURE(BM_SimulateTrial, boin_ts, "boin-ts");
BENCHMARK_CAPTURE(BM_SimulateTrial, boin_ts_eps, "boin-ts-eps:0.05");
BENCHMARK_CAPTURE(BM_SimulateTrial, keyboard_greedy, "keyboard-greedy");
BENCHMARK_MAIN();
