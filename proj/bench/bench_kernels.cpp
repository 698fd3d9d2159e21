// Copyright 2026 The greenrec Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Serial vs OpenMP timings for the parallel kernels.
//
//   ./bench_kernels --benchmark_filter=Neighbors

#include <random>

#include <benchmark/benchmark.h>

#include "greenrec/eval.hpp"
#include "greenrec/grid.hpp"
#include "greenrec/kernels.hpp"
#include "greenrec/models.hpp"
#include "greenrec/prep.hpp"
#include "greenrec/synth.hpp"

using namespace greenrec;

namespace {

struct Fixture {
  synth::SynthData data;
  prep::SplitResult split;
  models::TrainSet train;
  std::vector<Interaction> validation;
  std::vector<eval::ScoredRating> scored;
};

const Fixture& fixture() {
  static const Fixture f = [] {
    Fixture x;
    auto p = synth::SynthParams::preset("recipe-like");
    p.seed = 11;
    x.data = synth::generate(p);
    x.split = prep::split(x.data.dataset, {}, 11);
    x.train = models::share(build_matrix(x.data.dataset, x.split.train));
    for (auto r : x.split.validation) x.validation.push_back(x.data.dataset.interactions[r]);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> s(0, 5);
    for (const auto& v : x.validation) x.scored.push_back({v.user, v.item, s(rng), v.rating, s(rng)});
    return x;
  }();
  return f;
}

Exec policy(const benchmark::State& state) { return state.range(0) ? Exec::Parallel : Exec::Serial; }

void BM_ItemNeighbors(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(kernels::item_cosine_neighbors(*f.train, 0.0, policy(state)));
}

void BM_ItemNeighborsReference(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(kernels::item_cosine_neighbors_reference(*f.train, 0.0));
}

void BM_Slim(benchmark::State& state) {
  const auto& f = fixture();
  models::SlimOptions o;
  o.max_passes = 10;
  o.exec = policy(state);
  for (auto _ : state) benchmark::DoNotOptimize(models::fit_slim(f.train, o));
}

void BM_NdcgBatched(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(eval::ndcg_batched(f.scored, 10, {100, 1}, policy(state)));
}

void BM_GridSearch(benchmark::State& state) {
  const auto& f = fixture();
  const auto grid = models::HyperGrid::desk(models::Algorithm::SVD);
  models::GridSearchOptions o;
  o.exec = policy(state);
  for (auto _ : state)
    benchmark::DoNotOptimize(models::grid_search(models::Algorithm::SVD, grid, f.train, f.validation, o));
}

}  // namespace

// Arg 0: serial, 1: OpenMP.
BENCHMARK(BM_ItemNeighbors)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ItemNeighborsReference)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Slim)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_NdcgBatched)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_GridSearch)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->Iterations(1);

BENCHMARK_MAIN();
