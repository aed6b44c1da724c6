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

#include "hydes/geometry.hpp"
#include "hydes/probes.hpp"
#include "hydes/rng.hpp"

namespace {

using namespace hydes;

LabeledEmbeddings make_labeled(Eigen::Index n, Eigen::Index d, int classes) {
  Rng rng(11);
  LabeledEmbeddings out;
  out.embeddings.resize(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) out.embeddings(i, j) = rng.normal();
    out.embeddings.row(i) /= out.embeddings.row(i).norm();
    out.labels.push_back(static_cast<int>(i) % classes);
  }
  return out;
}

void BM_KnnProbe(benchmark::State& state) {
  const LabeledEmbeddings train = make_labeled(state.range(0), 16, 10);
  const LabeledEmbeddings test = make_labeled(state.range(0) / 4, 16, 10);
  for (auto _ : state) {
    benchmark::DoNotOptimize(knn_probe(train, test, 20));
  }
}
BENCHMARK(BM_KnnProbe)->Arg(512)->Arg(2048);

void BM_GeometryReport(benchmark::State& state) {
  const LabeledEmbeddings data = make_labeled(state.range(0), 16, 10);
  std::vector<int64_t> labels(data.labels.begin(), data.labels.end());
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        geometry_report(data.embeddings, labels, std::nullopt));
  }
}
BENCHMARK(BM_GeometryReport)->Arg(256)->Arg(1024);

}  // namespace
