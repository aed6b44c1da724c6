// Copyright 2026 The HyDeS Authors
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

#include <benchmark/benchmark.h>

#include "hydes/objective.hpp"
#include "hydes/rng.hpp"

namespace {

using namespace hydes;

EmbeddingBatch make_batch(Eigen::Index n, Eigen::Index d) {
  Rng rng(7);
  EmbeddingBatch batch;
  batch.rows.resize(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) batch.rows(i, j) = rng.normal();
    batch.rows.row(i) /= batch.rows.row(i).norm();
    batch.source_id.push_back(i / 8);
  }
  return batch;
}

void BM_MiObjective(benchmark::State& state) {
  const EmbeddingBatch batch = make_batch(state.range(0), state.range(1));
  const KernelParams params =
      KernelParams::create(2.0, static_cast<int>(state.range(1)));
  const LossWeights weights{1.0, 1.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(mi_objective(batch, params, weights).training_loss);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}
BENCHMARK(BM_MiObjective)->Args({64, 16})->Args({256, 16})->Args({512, 128});

void BM_MiGradient(benchmark::State& state) {
  const EmbeddingBatch batch = make_batch(state.range(0), state.range(1));
  const KernelParams params =
      KernelParams::create(2.0, static_cast<int>(state.range(1)));
  const LossWeights weights{1.0, 1.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(mi_gradient(batch, params, weights));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}
BENCHMARK(BM_MiGradient)->Args({64, 16})->Args({256, 16})->Args({512, 128});

}  // namespace
