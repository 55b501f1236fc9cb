#include <benchmark/benchmark.h>

#include <random>

#include "topotrail/hungarian.hpp"
#include "topotrail/metric.hpp"
#include "topotrail/persistence.hpp"
#include "topotrail/rips.hpp"
#include "topotrail/trajectory.hpp"
#include "topotrail/vectorize.hpp"

using namespace topotrail;

namespace {

const Trajectory& synthetic_day() {
  static const Dataset ds = generate_synthetic(default_synth_config());
  return ds.trajectories.front();
}

PersistenceDiagram random_diagram(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> birth(0.0, 10.0), life(0.01, 5.0);
  PersistenceDiagram d;
  d.dim = 1;
  for (std::size_t i = 0; i < n; ++i) {
    const double b = birth(rng);
    d.pairs.push_back({1, b, b + life(rng)});
  }
  return d;
}

}  // namespace

static void BM_RipsPersistence(benchmark::State& state) {
  const auto sub = subsample(synthetic_day(), SubsampleStrategy::kMaxMin,
                             static_cast<std::size_t>(state.range(0)));
  const auto dm = distance_matrix(sub);
  for (auto _ : state) benchmark::DoNotOptimize(rips_persistence(dm));
}
BENCHMARK(BM_RipsPersistence)->Arg(100)->Arg(200)->Arg(400)->Unit(benchmark::kMillisecond);

static void BM_ReduceBoundary(benchmark::State& state) {
  const auto sub = subsample(synthetic_day(), SubsampleStrategy::kMaxMin,
                             static_cast<std::size_t>(state.range(0)));
  const auto f = rips_filtration(distance_matrix(sub));
  for (auto _ : state) benchmark::DoNotOptimize(reduce_boundary(f));
}
BENCHMARK(BM_ReduceBoundary)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

static void BM_MaxMinSubsample(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(subsample(synthetic_day(), SubsampleStrategy::kMaxMin, 400));
  }
}
BENCHMARK(BM_MaxMinSubsample)->Unit(benchmark::kMillisecond);

static void BM_Assignment(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 100.0);
  std::vector<double> cost(n * n);
  for (auto& c : cost) c = u(rng);
  for (auto _ : state) benchmark::DoNotOptimize(solve_assignment(cost, n));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Assignment)->RangeMultiplier(2)->Range(16, 512)->Complexity(benchmark::oNCubed);

static void BM_Wasserstein(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto u = random_diagram(rng, n), v = random_diagram(rng, n);
  for (auto _ : state) benchmark::DoNotOptimize(wasserstein(u, v));
}
BENCHMARK(BM_Wasserstein)->Arg(50)->Arg(150)->Unit(benchmark::kMillisecond);

static void BM_PersistenceImage(benchmark::State& state) {
  std::mt19937_64 rng(3);
  const auto lt = lifetime_diagram(random_diagram(rng, static_cast<std::size_t>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(persistence_image(lt, 20, 1e-3));
}
BENCHMARK(BM_PersistenceImage)->Arg(20)->Arg(150);
BENCHMARK_MAIN();
