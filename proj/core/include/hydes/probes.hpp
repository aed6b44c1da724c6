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

#pragma once

#include <cstdint>
#include <vector>

#include "hydes/sphere.hpp"

namespace hydes {

struct LabeledEmbeddings {
  Matrix embeddings;        // N x D
  std::vector<int> labels;  // class indices in [0, C)

  Eigen::Index size() const { return embeddings.rows(); }
};

struct ProbeResult {
  double top1 = 0.0;
  double top5 = 0.0;
};

/// Frozen-representation linear probe: multinomial logistic regression
/// (softmax + cross-entropy) trained full-batch with AdamW from a zero
/// initialization. Deterministic.
struct LinearProbeConfig {
  int epochs = 100;
  double learning_rate = 1e-3;
  double weight_decay = 0.0;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
};

/// Throws ClassMissingInTrain when some class in [0, C) has no train
/// example. Top-5 uses min(5, C) candidates; ties rank lower class first.
ProbeResult linear_probe(const LabeledEmbeddings& train,
                         const LabeledEmbeddings& test,
                         const LinearProbeConfig& config = {});

/// Cosine-similarity kNN. Class score is the summed similarity of the k
/// nearest neighbors belonging to that class; ranking ties break toward the
/// lower class index, neighbor ties toward the lower train index.
ProbeResult knn_probe(const LabeledEmbeddings& train,
                      const LabeledEmbeddings& test, int k = 20);

/// Per-class proportional split (at least one train sample per class).
struct SplitIndices {
  std::vector<Eigen::Index> train;
  std::vector<Eigen::Index> test;
};
SplitIndices stratified_split(const std::vector<int>& labels,
                              double train_fraction, uint64_t seed);

}  // namespace hydes
