#include <random>

#include <benchmark/benchmark.h>

#include <hbdiag/align.hpp>
#include <hbdiag/features.hpp>
#include <hbdiag/synth.hpp>

using namespace hbdiag;

namespace {

std::vector<double> walk(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z;
  std::vector<double> v(n);
  double acc = 0;
  for (auto& x : v) x = acc += z(rng);
  return v;
}

void BM_Dtw(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  auto q = walk(n, 1), c = walk(n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(dtw_distance(q, c));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Dtw)->RangeMultiplier(2)->Range(64, 1024)->Complexity(benchmark::oNSquared);

void BM_DtwBanded(benchmark::State& state) {
  auto q = walk(1024, 1), c = walk(1024, 2);
  const auto band = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(dtw_distance(q, c, DtwCost::squared, band));
}
BENCHMARK(BM_DtwBanded)->Arg(10)->Arg(50)->Arg(200);

void BM_Envelope(benchmark::State& state) {
  auto q = walk(100000, 3);
  const auto w = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(envelope(q, w));
}
BENCHMARK(BM_Envelope)->Arg(10)->Arg(1000);

void BM_LbKeogh(benchmark::State& state) {
  auto q = walk(10000, 4), c = walk(10000, 5);
  for (auto _ : state) benchmark::DoNotOptimize(lb_keogh(q, c, 10));
}
BENCHMARK(BM_LbKeogh);

void BM_AutoFit(benchmark::State& state) {
  const auto run = gen_normal(builtin_profile("NPB-cg"), 6);
  const auto hr = derive_heart_rate(run[0]);
  for (auto _ : state) benchmark::DoNotOptimize(auto_fit(hr));
}
BENCHMARK(BM_AutoFit);

void BM_ExtractFeatures(benchmark::State& state) {
  const auto profile = builtin_profile("NPB-cg", static_cast<std::size_t>(state.range(0)));
  const auto q = gen_normal(profile, 7);
  const auto c = gen_normal(profile, 8);
  for (auto _ : state) benchmark::DoNotOptimize(extract_features(c[0], q[0]));
}
BENCHMARK(BM_ExtractFeatures)->Arg(2000)->Arg(20000);

}  // namespace

BENCHMARK_MAIN();
