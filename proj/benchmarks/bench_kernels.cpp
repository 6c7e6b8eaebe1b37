#include <benchmark/benchmark.h>

#include <vector>

#include "fpg/envs.hpp"
#include "fpg/frac_math.hpp"
#include "fpg/frac_td.hpp"
#include "fpg/policy.hpp"
#include "fpg/rng.hpp"

namespace {

std::vector<double> noise(std::size_t n) {
  fpg::Rng rng(7);
  std::vector<double> d(n);
  for (double& x : d) x = rng.normal();
  return d;
}

// Per-step cost of the exact convolution at history length t.
void BM_NaiveStep(benchmark::State& state) {
  const auto t = static_cast<std::size_t>(state.range(0));
  const auto d = noise(t + 1);
  const auto w = fpg::math::gl_weights(0.7, t);
  for (auto _ : state) {
    fpg::math::KahanSum s;
    for (std::size_t k = 0; k <= t; ++k) s.add(w[k] * d[t - k]);
    benchmark::DoNotOptimize(s.value());
  }
}
BENCHMARK(BM_NaiveStep)->RangeMultiplier(10)->Range(10, 100000);

void BM_FirSequence(benchmark::State& state) {
  const auto d = noise(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(fpg::td::fir_frac_td(d, 0.7, 64));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FirSequence)->Arg(10000);

void BM_RecursiveStep(benchmark::State& state) {
  const auto t0 = static_cast<std::uint64_t>(state.range(0));
  const auto cfg = fpg::td::make_frac_td_config(0.7);
  const auto d = noise(1024);
  fpg::td::FracTdState s;
  s.t = t0;
  s.max_abs_delta = 3.0;
  std::size_t i = 0;
  for (auto _ : state) {
    auto [next, out] = fpg::td::recursive_step(s, d[i++ & 1023], cfg);
    benchmark::DoNotOptimize(out);
    next.t = t0;
    s = next;
  }
}
BENCHMARK(BM_RecursiveStep)->RangeMultiplier(10)->Range(10, 100000);

void BM_PolicyScore(benchmark::State& state) {
  auto env = fpg::envs::make_env("cartpole");
  fpg::Rng rng(1);
  const auto params =
      fpg::policy::init_policy(fpg::policy::policy_arch_for(env->spec(), 64), rng);
  const auto obs = env->reset(0);
  const std::vector<double> action = {1.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(fpg::policy::score(params, obs, action));
  }
}
BENCHMARK(BM_PolicyScore);

}  // namespace

BENCHMARK_MAIN();
