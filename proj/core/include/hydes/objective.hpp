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

enum class ViewKind : uint8_t { kGlobal = 0, kLocal = 1 };

/// A mini-batch of unit embeddings. Rows sharing a source_id are views of
/// the same input and define the positive sets P(i) = { j != i :
/// source_id[j] == source_id[i] }. Construction does not validate; call
/// validate() where the invariants must hold (gradient checks evaluate the
/// objective at slightly off-sphere points on purpose).
struct EmbeddingBatch {
  Matrix rows;                      // N x D
  std::vector<int64_t> source_id;   // N entries
  std::vector<ViewKind> view_kind;  // N entries, all-global if empty

  Eigen::Index size() const { return rows.rows(); }
  Eigen::Index dim() const { return rows.cols(); }

  /// Checks unit norms (within tol), N >= 2, and id/tag lengths.
  void validate(double tol = 1e-9) const;
};

struct LossWeights {
  double alpha = 1.0;
  double beta = 1.0;
};

struct LossBreakdown {
  double h_global = 0.0;      // nats
  double h_local = 0.0;       // nats
  double mi_objective = 0.0;  // alpha * h_global - beta * h_local
  double training_loss = 0.0; // -mi_objective
};

/// Which rows act as anchors of the local term. The symmetric reading
/// (every view anchors) is the default; the global-anchors-only variant is
/// the DINO-style asymmetric alternative.
enum class AnchorPolicy { kAllViews, kGlobalViewsOnly };

struct ObjectiveOptions {
  AnchorPolicy anchors = AnchorPolicy::kAllViews;
};

/// log( mean exp(v_k) ), computed as m + log(mean(exp(v_k - m))).
double log_mean_exp(const Vector& values);

/// Leave-one-out kernel entropy estimate over the whole batch:
/// mean_i of -log mean_{j != i} K_kappa(Z_i, Z_j).
double global_entropy(const EmbeddingBatch& batch, const KernelParams& params);

/// Kernel entropy restricted to positive sets:
/// mean over anchors i of -log mean_{j in P(i)} K_kappa(Z_i, Z_j).
/// Throws NoPositives when an anchor has an empty positive set.
double local_entropy(const EmbeddingBatch& batch, const KernelParams& params,
                     const ObjectiveOptions& opts = {});

/// Mutual-information objective of the method: alpha * H_global - beta *
/// H_local, with training_loss = -mi_objective. With alpha == beta the value
/// does not depend on include_const (the normalizer cancels).
LossBreakdown mi_objective(const EmbeddingBatch& batch,
                           const KernelParams& params,
                           const LossWeights& weights,
                           const ObjectiveOptions& opts = {});

/// Analytic d(training_loss)/dZ, an N x D matrix. Softmax-weighted pair
/// terms accumulated symmetrically: each pair contributes through both its
/// (i, j) and (j, i) appearances.
Matrix mi_gradient(const EmbeddingBatch& batch, const KernelParams& params,
                   const LossWeights& weights,
                   const ObjectiveOptions& opts = {});

/// Composes the tangent-space Jacobian of v -> v/||v||, yielding gradients
/// with respect to pre-projection vectors:
/// g_v[i] = (I - Z_i Z_i^T) g_z[i] / ||v_i||.
Matrix pre_projection_gradient(const Matrix& grad_embeddings,
                               const Matrix& unit_rows,
                               const Vector& pre_norms);

}  // namespace hydes
