#include <benchmark/benchmark.h>

#include <random>

#include "harnack/bhp.hpp"
#include "harnack/estimators.hpp"
#include "harnack/gallery.hpp"
#include "harnack/potential.hpp"

using namespace harnack;

static void BM_Factor(benchmark::State& state) {
  auto inst = build_grid(static_cast<int>(state.range(0)), static_cast<int>(state.range(0)));
  for (auto _ : state) {
    DirichletSolver s(inst.domain.graph(), inst.domain.interior());
    benchmark::DoNotOptimize(s.size());
  }
  state.SetComplexityN(state.range(0) * state.range(0));
}
BENCHMARK(BM_Factor)->RangeMultiplier(2)->Range(32, 256)->Unit(benchmark::kMillisecond)->Complexity();

static void BM_GreenColumn(benchmark::State& state) {
  auto inst = build_grid(static_cast<int>(state.range(0)), static_cast<int>(state.range(0)));
  DirichletSolver s(inst.domain.graph(), inst.domain.interior());
  const VertexId c = inst.landmark("center");
  for (auto _ : state) benchmark::DoNotOptimize(s.green_column(c).sum());
}
BENCHMARK(BM_GreenColumn)->RangeMultiplier(2)->Range(32, 256)->Unit(benchmark::kMicrosecond);

static void BM_CrossRatio(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  const auto n = state.range(0);
  Eigen::MatrixXd k(n, 4 * n);
  for (Eigen::Index i = 0; i < k.size(); ++i) k.data()[i] = u(rng);
  for (auto _ : state) benchmark::DoNotOptimize(max_cross_ratio(k).value);
}
BENCHMARK(BM_CrossRatio)->RangeMultiplier(4)->Range(16, 1024)->Unit(benchmark::kMillisecond);

static void BM_InnerBall(benchmark::State& state) {
  auto inst = build_slit_grid(60, 1.0);
  const VertexId tip = inst.landmark("tip");
  const std::vector<VertexId> src{tip};
  for (auto _ : state)
    benchmark::DoNotOptimize(shortest_distances(inst.domain.graph(), src, inst.domain.interior_mask()).size());
}
BENCHMARK(BM_InnerBall)->Unit(benchmark::kMillisecond);

static void BM_SlitBhp(benchmark::State& state) {
  auto inst = build_slit_grid(60, 1.0);
  BhpConfig c{inst.domain};
  c.xi = inst.landmark("tip");
  c.r = static_cast<double>(state.range(0));
  c.A0 = 3.5;
  c.A3 = 2.5;
  c.A4 = 3.5;
  c.annulus_half_width = 0.5;
  for (auto _ : state) benchmark::DoNotOptimize(bhp_constant(c).C1);
}
BENCHMARK(BM_SlitBhp)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

static void BM_EhiGrid(benchmark::State& state) {
  auto inst = build_grid(65, 65);
  const VertexId c = inst.landmark("center");
  for (auto _ : state)
    benchmark::DoNotOptimize(ehi_constant(inst.domain.graph(), c, static_cast<double>(state.range(0)), 0.5).C_H);
}
BENCHMARK(BM_EhiGrid)->Arg(4)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
