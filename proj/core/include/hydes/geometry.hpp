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
#include <optional>
#include <vector>

#include "hydes/sphere.hpp"

namespace hydes {

struct AngleStats {
  double mean_deg = 0.0;
  double std_deg = 0.0;
};

/// Latent-geometry diagnostics. Definitions the source tables leave open are
/// pinned here and recorded in every report header:
///  - anisotropy: top-eigenvalue share of the covariance trace;
///  - effective rank: exp(spectral entropy) of singular values, embedding
///    rank on the centered embedding matrix, centroid rank on normalized
///    class centroids;
///  - d': standardized separation of within/between cosine distributions;
///  - sparsity: fraction of coordinates with |value| < tau / sqrt(D).
struct GeometryReport {
  double anisotropy = 0.0;
  double feature_correlation = 0.0;
  double center_vector_norm = 0.0;
  double centroid_rank = 0.0;
  double embedding_rank = 0.0;
  double d_prime = 0.0;
  AngleStats all_pairs;
  AngleStats positive_pairs;
  double sparsity = 0.0;
};

struct GeometryOptions {
  double sparsity_tau = 0.01;
  int64_t pair_sample_cap = 1000000;
  uint64_t pair_seed = 17;
  bool use_stable_rank = false;  // alternative rank, excluded from acceptance
};

/// lambda_max / sum(lambda) of the sample covariance.
double anisotropy(const Matrix& embeddings);

/// Mean absolute off-diagonal Pearson correlation across coordinates;
/// constant features contribute zero.
double feature_correlation(const Matrix& embeddings);

/// || mean of rows ||_2.
double center_vector_norm(const Matrix& embeddings);

/// exp(-sum p_k log p_k) with p_k = sigma_k / sum sigma over singular values.
double effective_rank(const Matrix& matrix);

/// ||M||_F^2 / sigma_max^2, the flag alternative.
double stable_rank(const Matrix& matrix);

/// d' over cosine-similarity distributions of same-label vs different-label
/// pairs; pairs subsampled to the cap with a seeded generator.
double sensitivity_index(const Matrix& embeddings, const std::vector<int64_t>& labels,
                         int64_t pair_cap = 1000000, uint64_t seed = 17);

/// Angle statistics in degrees via arccos of clamped cosines. All-pairs over
/// sampled distinct pairs (exhaustive under the cap), positive pairs over
/// P(i) exhaustively.
AngleStats all_pairs_angle_stats(const Matrix& embeddings,
                                 int64_t pair_cap = 1000000, uint64_t seed = 17);
AngleStats positive_pairs_angle_stats(const Matrix& embeddings,
                                      const std::vector<int64_t>& source_id);

/// Fraction of coordinates with |value| < tau * (1 / sqrt(D)).
double sparsity(const Matrix& embeddings, double tau = 0.01);

/// Normalized class centroids and their clamped cosine-similarity matrix.
Matrix class_centroids(const Matrix& embeddings, const std::vector<int64_t>& labels);
Matrix centroid_similarity_matrix(const Matrix& embeddings,
                                  const std::vector<int64_t>& labels);

/// Full report. Positive-pair stats need source ids; centroid rank and d'
/// need labels. Missing inputs leave NaN in the affected fields.
GeometryReport geometry_report(
    const Matrix& embeddings,
    const std::optional<std::vector<int64_t>>& labels,
    const std::optional<std::vector<int64_t>>& source_id,
    const GeometryOptions& opts = {});

}  // namespace hydes
