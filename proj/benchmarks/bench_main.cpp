#include <benchmark/benchmark.h>

#include "robann/dp.hpp"
#include "robann/fair.hpp"
#include "robann/harness.hpp"
#include "robann/lsh.hpp"
#include "robann/metric.hpp"

namespace {

using namespace robann;

ProblemParams bench_params() {
  ProblemParams params;
  params.c = 2.0;
  params.r = 2.0;
  params.max_queries = 1000;
  params.delta = 0.001;
  return params;
}

void BM_HammingDistance(benchmark::State& state) {
  RngStream rng(1, 1);
  const auto d = static_cast<std::size_t>(state.range(0));
  const Point a = random_hamming_point(d, rng);
  const Point b = random_hamming_point(d, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(distance(a, b));
  }
}
BENCHMARK(BM_HammingDistance)->Arg(64)->Arg(256)->Arg(1024);

void BM_LaplaceSample(benchmark::State& state) {
  RngStream rng(2, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(dp::laplace_sample(1.0, rng));
  }
}
BENCHMARK(BM_LaplaceSample);

void BM_IndexBuild(benchmark::State& state) {
  RngStream rng(3, 3);
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto ds = random_hamming_dataset(n, 32, rng);
  const auto params = bench_params();
  const auto lp = derive_params(params, n, 32, 4.0, 7);
  for (auto _ : state) {
    AmplifiedLshIndex idx(ds, params, lp);
    benchmark::DoNotOptimize(idx.lsh_params().L_tables);
  }
}
BENCHMARK(BM_IndexBuild)->Arg(256)->Arg(1024);

void BM_ClassicQuery(benchmark::State& state) {
  RngStream rng(4, 4);
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto params = bench_params();
  const auto inst = planted_instance(n, 32, params, 1, rng);
  AmplifiedLshIndex idx(inst.data, params,
                        derive_params(params, n, 32, 4.0, 9));
  for (auto _ : state) {
    benchmark::DoNotOptimize(idx.classic_query(inst.query));
  }
}
BENCHMARK(BM_ClassicQuery)->Arg(256)->Arg(1024)->Arg(4096);

void BM_FairQuery(benchmark::State& state) {
  RngStream rng(5, 5);
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto params = bench_params();
  const auto inst = planted_instance(n, 32, params, 3, rng);
  FairIndex fi(inst.data, params, 11);
  std::uint64_t ordinal = 0;
  for (auto _ : state) {
    RngStream qrng = derive_stream(6, "query", ordinal++);
    benchmark::DoNotOptimize(fi.query(inst.query, qrng));
  }
}
BENCHMARK(BM_FairQuery)->Arg(256)->Arg(1024);

}  // namespace

BENCHMARK_MAIN();
