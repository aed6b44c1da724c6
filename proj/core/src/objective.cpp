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

#include "hydes/objective.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "hydes/errors.hpp"

namespace hydes {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

bool is_anchor(const EmbeddingBatch& batch, Eigen::Index i,
               AnchorPolicy policy) {
  if (policy == AnchorPolicy::kAllViews) return true;
  if (batch.view_kind.empty()) return true;
  return batch.view_kind[static_cast<size_t>(i)] == ViewKind::kGlobal;
}

bool same_source(const EmbeddingBatch& batch, Eigen::Index i, Eigen::Index j) {
  return batch.source_id[static_cast<size_t>(i)] ==
         batch.source_id[static_cast<size_t>(j)];
}

/// log-mean-exp over the entries of `scores` selected by `select`,
/// accumulated in fixed index order. Returns -inf when nothing selected.
template <typename Select>
double masked_log_mean_exp(const Eigen::RowVectorXd& scores, Select select) {
  double max_score = kNegInf;
  Eigen::Index count = 0;
  for (Eigen::Index j = 0; j < scores.size(); ++j) {
    if (!select(j)) continue;
    ++count;
    if (scores[j] > max_score) max_score = scores[j];
  }
  if (count == 0) return kNegInf;
  double sum = 0.0;
  for (Eigen::Index j = 0; j < scores.size(); ++j) {
    if (select(j)) sum += std::exp(scores[j] - max_score);
  }
  return max_score + std::log(sum / static_cast<double>(count));
}

/// Adds the symmetric softmax pair contributions of anchor i over the
/// selected index set into `grad`, scaled by `weight`:
///   grad[i] += weight * sum_j w_ij Z_j,  grad[j] += weight * w_ij * Z_i.
template <typename Select>
void accumulate_softmax_pairs(const EmbeddingBatch& batch,
                              const Eigen::RowVectorXd& scores,
                              Eigen::Index i, double weight, Select select,
                              Matrix& grad) {
  double max_score = kNegInf;
  for (Eigen::Index j = 0; j < scores.size(); ++j) {
    if (select(j) && scores[j] > max_score) max_score = scores[j];
  }
  if (max_score == kNegInf) return;
  double denom = 0.0;
  for (Eigen::Index j = 0; j < scores.size(); ++j) {
    if (select(j)) denom += std::exp(scores[j] - max_score);
  }
  for (Eigen::Index j = 0; j < scores.size(); ++j) {
    if (!select(j)) continue;
    const double w = std::exp(scores[j] - max_score) / denom;
    grad.row(i) += weight * w * batch.rows.row(j);
    grad.row(j) += weight * w * batch.rows.row(i);
  }
}

void check_local_preconditions(const EmbeddingBatch& batch,
                               AnchorPolicy policy) {
  const Eigen::Index n = batch.size();
  if (static_cast<Eigen::Index>(batch.source_id.size()) != n) {
    raise(ErrorCode::kShapeMismatch, "source_id length does not match rows");
  }
  Eigen::Index anchors = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!is_anchor(batch, i, policy)) continue;
    ++anchors;
    bool found = false;
    for (Eigen::Index j = 0; j < n && !found; ++j) {
      found = (j != i) && same_source(batch, i, j);
    }
    if (!found) {
      raise(ErrorCode::kNoPositives,
            "anchor " + std::to_string(i) + " has an empty positive set");
    }
  }
  if (anchors == 0) {
    raise(ErrorCode::kNoPositives, "no anchor rows in the batch");
  }
}

}  // namespace

void EmbeddingBatch::validate(double tol) const {
  if (rows.rows() < 2) raise(ErrorCode::kBatchTooSmall, "batch needs N >= 2");
  if (rows.cols() < 2) raise(ErrorCode::kInvalidParam, "batch needs D >= 2");
  if (static_cast<Eigen::Index>(source_id.size()) != rows.rows()) {
    raise(ErrorCode::kShapeMismatch, "source_id length does not match rows");
  }
  if (!view_kind.empty() &&
      static_cast<Eigen::Index>(view_kind.size()) != rows.rows()) {
    raise(ErrorCode::kShapeMismatch, "view_kind length does not match rows");
  }
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    if (std::fabs(rows.row(i).norm() - 1.0) > tol) {
      raise(ErrorCode::kInvalidParam,
            "row " + std::to_string(i) + " is not unit-norm");
    }
  }
}

double log_mean_exp(const Vector& values) {
  if (values.size() == 0) raise(ErrorCode::kEmptyInput, "log_mean_exp of nothing");
  const double m = values.maxCoeff();
  double sum = 0.0;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    sum += std::exp(values[i] - m);
  }
  return m + std::log(sum / static_cast<double>(values.size()));
}

double global_entropy(const EmbeddingBatch& batch, const KernelParams& params) {
  const Eigen::Index n = batch.size();
  if (n < 2) raise(ErrorCode::kBatchTooSmall, "global_entropy needs N >= 2");
  const Matrix scores =
      params.kappa * cosine_similarity_matrix(batch.rows, batch.rows);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    acc += masked_log_mean_exp(scores.row(i),
                               [i](Eigen::Index j) { return j != i; });
  }
  const double mean_lme = acc / static_cast<double>(n);
  return params.include_const ? -params.log_norm_const - mean_lme : -mean_lme;
}

double local_entropy(const EmbeddingBatch& batch, const KernelParams& params,
                     const ObjectiveOptions& opts) {
  const Eigen::Index n = batch.size();
  if (n < 2) raise(ErrorCode::kBatchTooSmall, "local_entropy needs N >= 2");
  check_local_preconditions(batch, opts.anchors);
  const Matrix scores =
      params.kappa * cosine_similarity_matrix(batch.rows, batch.rows);
  double acc = 0.0;
  Eigen::Index anchors = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!is_anchor(batch, i, opts.anchors)) continue;
    ++anchors;
    acc += masked_log_mean_exp(scores.row(i), [&](Eigen::Index j) {
      return j != i && same_source(batch, i, j);
    });
  }
  const double mean_lme = acc / static_cast<double>(anchors);
  return params.include_const ? -params.log_norm_const - mean_lme : -mean_lme;
}

LossBreakdown mi_objective(const EmbeddingBatch& batch,
                           const KernelParams& params,
                           const LossWeights& weights,
                           const ObjectiveOptions& opts) {
  LossBreakdown out;
  out.h_global = global_entropy(batch, params);
  out.h_local = local_entropy(batch, params, opts);
  out.mi_objective = weights.alpha * out.h_global - weights.beta * out.h_local;
  out.training_loss = -out.mi_objective;
  return out;
}

Matrix mi_gradient(const EmbeddingBatch& batch, const KernelParams& params,
                   const LossWeights& weights, const ObjectiveOptions& opts) {
  const Eigen::Index n = batch.size();
  if (n < 2) raise(ErrorCode::kBatchTooSmall, "mi_gradient needs N >= 2");
  check_local_preconditions(batch, opts.anchors);
  const Matrix scores =
      params.kappa * cosine_similarity_matrix(batch.rows, batch.rows);

  Matrix grad = Matrix::Zero(n, batch.dim());
  // training_loss = (alpha - beta) log C + alpha * mean_i G_i - beta *
  // mean_anchors L_i with G/L the log-mean-exp terms, so each anchor
  // contributes softmax-weighted pair terms scaled by kappa / #anchors.
  const double global_weight =
      weights.alpha * params.kappa / static_cast<double>(n);
  Eigen::Index anchors = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (is_anchor(batch, i, opts.anchors)) ++anchors;
  }
  const double local_weight =
      -weights.beta * params.kappa / static_cast<double>(anchors);

  for (Eigen::Index i = 0; i < n; ++i) {
    if (weights.alpha != 0.0) {
      accumulate_softmax_pairs(batch, scores.row(i), i, global_weight,
                               [i](Eigen::Index j) { return j != i; }, grad);
    }
    if (weights.beta != 0.0 && is_anchor(batch, i, opts.anchors)) {
      accumulate_softmax_pairs(
          batch, scores.row(i), i, local_weight,
          [&](Eigen::Index j) { return j != i && same_source(batch, i, j); },
          grad);
    }
  }
  return grad;
}

Matrix pre_projection_gradient(const Matrix& grad_embeddings,
                               const Matrix& unit_rows,
                               const Vector& pre_norms) {
  if (grad_embeddings.rows() != unit_rows.rows() ||
      grad_embeddings.cols() != unit_rows.cols() ||
      pre_norms.size() != unit_rows.rows()) {
    raise(ErrorCode::kShapeMismatch, "pre_projection_gradient: shape mismatch");
  }
  Matrix out(grad_embeddings.rows(), grad_embeddings.cols());
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    const double radial = unit_rows.row(i).dot(grad_embeddings.row(i));
    out.row(i) =
        (grad_embeddings.row(i) - radial * unit_rows.row(i)) / pre_norms[i];
  }
  return out;
}

}  // namespace hydes
