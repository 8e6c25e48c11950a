// Copyright 2026 The kpc Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <numeric>
#include <vector>

#include <benchmark/benchmark.h>

#include "kpc/adaptive.hpp"
#include "kpc/dataset.hpp"
#include "kpc/precond.hpp"
#include "kpc/sweep.hpp"

namespace {

kpc::PointSet cube(kpc::Index n) { return kpc::gen_synthetic(n, 3, kpc::default_edge(n, 3), 1); }

kpc::KernelSpec gaussian(double l, double mu = 1e-4) {
  kpc::KernelSpec s;
  s.length_scale = l;
  s.mu = mu;
  return s;
}

void BM_Matvec(benchmark::State& state) {
  const kpc::PointSet ps = cube(state.range(0));
  const Eigen::VectorXd v = kpc::random_rhs(ps.size(), 0);
  for (auto _ : state) benchmark::DoNotOptimize(kpc::matvec(gaussian(3.0), ps, v));
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}
BENCHMARK(BM_Matvec)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);

void BM_Fps(benchmark::State& state) {
  const kpc::PointSet ps = cube(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(kpc::fps_sample(ps, state.range(1)));
}
BENCHMARK(BM_Fps)->Args({4000, 100})->Args({16000, 500})->Unit(benchmark::kMillisecond);

void BM_KnnPattern(benchmark::State& state) {
  const kpc::PointSet ps = cube(state.range(0));
  std::vector<kpc::Index> order(static_cast<std::size_t>(ps.size()));
  std::iota(order.begin(), order.end(), kpc::Index{0});
  for (auto _ : state) benchmark::DoNotOptimize(kpc::knn_pattern(ps, order, 100));
}
BENCHMARK(BM_KnnPattern)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_BuildAfn(benchmark::State& state) {
  const kpc::PointSet ps = cube(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(kpc::build_afn(gaussian(3.0), ps, state.range(1), 100));
}
BENCHMARK(BM_BuildAfn)->Args({2000, 200})->Unit(benchmark::kMillisecond);

void BM_ApplyAfn(benchmark::State& state) {
  const kpc::PointSet ps = cube(state.range(0));
  const kpc::AfnFactors F = kpc::build_afn(gaussian(3.0), ps, state.range(1), 100);
  const Eigen::VectorXd r = kpc::random_rhs(ps.size(), 0);
  for (auto _ : state) benchmark::DoNotOptimize(kpc::apply_afn_inv(F, r));
}
BENCHMARK(BM_ApplyAfn)->Args({2000, 200})->Unit(benchmark::kMicrosecond);

void BM_BuildNystrom(benchmark::State& state) {
  const kpc::PointSet ps = cube(state.range(0));
  const kpc::LandmarkSelection sel = kpc::fps_sample(ps, state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(kpc::build_nystrom(gaussian(5.0), ps, sel));
}
BENCHMARK(BM_BuildNystrom)->Args({4000, 300})->Unit(benchmark::kMillisecond);

void BM_EstimateRank(benchmark::State& state) {
  const kpc::PointSet ps = cube(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(kpc::estimate_rank(gaussian(5.0), ps, 100, 0));
}
BENCHMARK(BM_EstimateRank)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
