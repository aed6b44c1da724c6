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

#include "hydes/sphere.hpp"
#include "hydes/views.hpp"

namespace {

using namespace hydes;

void BM_LogVmfNormalizer(benchmark::State& state) {
  const double kappa = static_cast<double>(state.range(0));
  const int dim = static_cast<int>(state.range(1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(log_vmf_normalizer(kappa, dim));
  }
}
BENCHMARK(BM_LogVmfNormalizer)
    ->Args({1, 16})
    ->Args({20, 16})
    ->Args({100, 512})
    ->Args({10000, 4096});

void BM_VmfSample(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  Rng rng(3);
  Vector mu = Vector::Zero(dim);
  mu[0] = 1.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_vmf(mu, 20.0, rng));
  }
}
BENCHMARK(BM_VmfSample)->Arg(4)->Arg(64);

void BM_CosineSimilarityMatrix(benchmark::State& state) {
  Rng rng(5);
  const Eigen::Index n = state.range(0), d = state.range(1);
  Matrix z(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) z(i, j) = rng.normal();
    z.row(i) /= z.row(i).norm();
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(cosine_similarity_matrix(z, z));
  }
  state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_CosineSimilarityMatrix)->Args({256, 16})->Args({512, 128});

}  // namespace
