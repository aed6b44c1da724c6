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

#include <string>
#include <vector>

#include "hydes/sphere.hpp"

namespace hydes {

enum class SimilarityKind { kWup, kLch, kTextEmbedding };

SimilarityKind parse_similarity_kind(const std::string& name);
const char* to_string(SimilarityKind kind);

/// Externally supplied class-similarity matrix (ingested, never computed
/// here). CSV format: first row "name,<class1>,...,<classC>", then one row
/// per class. All three kinds are similarities; to_distance() maps them to
/// (max entry - value).
struct ExternalSimilarity {
  std::vector<std::string> class_names;
  Matrix matrix;
  SimilarityKind kind = SimilarityKind::kWup;

  void validate() const;
  Matrix to_distance() const;
};

ExternalSimilarity read_external_similarity_csv(const std::string& path,
                                                SimilarityKind kind);

/// Spearman rank correlation with average-rank ties. Throws LengthMismatch
/// and DegenerateVariance.
double spearman(const Vector& x, const Vector& y);

/// Spearman between centroid cosine distances (1 - cos) and the external
/// distances, class order matched by name. Throws ClassNameMismatch when a
/// centroid class is absent from the external matrix.
double alignment_correlation(const Matrix& centroids,
                             const std::vector<std::string>& class_names,
                             const ExternalSimilarity& external);

/// Agglomeration history: merges[t] joined cluster ids left/right at the
/// given height. Leaves are ids 0..C-1; merge t creates id C+t.
struct Dendrogram {
  struct Merge {
    int left = 0;
    int right = 0;
    double height = 0.0;
  };
  std::vector<Merge> merges;
  int leaf_count = 0;
};

/// UPGMA with cluster distances computed as exact means over member leaf
/// pairs (summed in sorted leaf order). Ties merge the smallest (i, j)
/// lexicographic pair among minimal distances.
Dendrogram average_linkage(const Matrix& dist);

/// Height of the lowest common merge per leaf pair; zero diagonal.
Matrix cophenetic_matrix(const Dendrogram& dendrogram);

/// Spearman between the cophenetic distances and the external distances
/// (upper triangles). The classic Pearson variant sits behind its own
/// function.
double cophenetic_correlation(const Dendrogram& dendrogram,
                              const Matrix& external_dist);
double cophenetic_correlation_pearson(const Dendrogram& dendrogram,
                                      const Matrix& external_dist);

/// Upper triangle (i < j) flattened row-major; shared by the correlation
/// paths and their tests.
Vector upper_triangle(const Matrix& m);

}  // namespace hydes
