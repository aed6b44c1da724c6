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

#include "hydes/geometry.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "hydes/errors.hpp"
#include "hydes/rng.hpp"

namespace hydes {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Matrix centered(const Matrix& m) {
  return m.rowwise() - m.colwise().mean();
}

/// Visits distinct pairs (i < j): exhaustively when their count fits the
/// cap, otherwise `cap` seeded uniform draws (with replacement across pairs).
template <typename Visit>
void visit_pairs(Eigen::Index n, int64_t cap, uint64_t seed, Visit visit) {
  const int64_t total = static_cast<int64_t>(n) * (n - 1) / 2;
  if (total <= cap) {
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i + 1; j < n; ++j) visit(i, j);
    }
    return;
  }
  Rng rng(derive_seed(seed, 0xA17ULL));
  for (int64_t t = 0; t < cap; ++t) {
    const Eigen::Index i = static_cast<Eigen::Index>(rng.uniform_index(n));
    Eigen::Index j = static_cast<Eigen::Index>(rng.uniform_index(n - 1));
    if (j >= i) ++j;
    visit(std::min(i, j), std::max(i, j));
  }
}

double clamped_cos(const Matrix& m, Eigen::Index i, Eigen::Index j) {
  return std::clamp(m.row(i).dot(m.row(j)), -1.0, 1.0);
}

struct Moments {
  int64_t count = 0;
  double sum = 0.0;
  double sum_sq = 0.0;

  void add(double v) {
    ++count;
    sum += v;
    sum_sq += v * v;
  }
  double mean() const { return sum / static_cast<double>(count); }
  double variance() const {
    const double mu = mean();
    return std::max(0.0, sum_sq / static_cast<double>(count) - mu * mu);
  }
};

void check_min_rows(const Matrix& m, Eigen::Index min_rows, const char* what) {
  if (m.rows() < min_rows) {
    raise(ErrorCode::kBatchTooSmall,
          std::string(what) + " needs at least " + std::to_string(min_rows) + " rows");
  }
}

}  // namespace

double anisotropy(const Matrix& embeddings) {
  check_min_rows(embeddings, 2, "anisotropy");
  const Matrix c = centered(embeddings);
  const Matrix cov =
      c.transpose() * c / static_cast<double>(embeddings.rows());
  const double trace = cov.trace();
  if (!(trace > 0.0)) {
    raise(ErrorCode::kDegenerateBatch, "covariance is all-zero");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(cov, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().maxCoeff() / trace;
}

double feature_correlation(const Matrix& embeddings) {
  check_min_rows(embeddings, 2, "feature_correlation");
  const Eigen::Index d = embeddings.cols();
  const Matrix c = centered(embeddings);
  Vector std_dev(d);
  for (Eigen::Index j = 0; j < d; ++j) {
    std_dev[j] = std::sqrt(c.col(j).squaredNorm() /
                           static_cast<double>(embeddings.rows()));
  }
  double acc = 0.0;
  int64_t count = 0;
  for (Eigen::Index a = 0; a < d; ++a) {
    for (Eigen::Index b = a + 1; b < d; ++b) {
      ++count;
      if (std_dev[a] <= 0.0 || std_dev[b] <= 0.0) continue;  // constant feature
      const double cov = c.col(a).dot(c.col(b)) /
                         static_cast<double>(embeddings.rows());
      acc += std::fabs(cov / (std_dev[a] * std_dev[b]));
    }
  }
  return count > 0 ? acc / static_cast<double>(count) : 0.0;
}

double center_vector_norm(const Matrix& embeddings) {
  check_min_rows(embeddings, 1, "center_vector_norm");
  return embeddings.colwise().mean().norm();
}

double effective_rank(const Matrix& matrix) {
  Eigen::JacobiSVD<Matrix> svd(matrix);
  const Vector sigma = svd.singularValues();
  const double total = sigma.sum();
  if (!(total > 0.0)) raise(ErrorCode::kZeroMatrix, "all singular values are zero");
  double entropy = 0.0;
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    const double p = sigma[i] / total;
    if (p > 0.0) entropy -= p * std::log(p);
  }
  return std::exp(entropy);
}

double stable_rank(const Matrix& matrix) {
  Eigen::JacobiSVD<Matrix> svd(matrix);
  const Vector sigma = svd.singularValues();
  const double top = sigma.maxCoeff();
  if (!(top > 0.0)) raise(ErrorCode::kZeroMatrix, "all singular values are zero");
  return sigma.squaredNorm() / (top * top);
}

double sensitivity_index(const Matrix& embeddings,
                         const std::vector<int64_t>& labels, int64_t pair_cap,
                         uint64_t seed) {
  check_min_rows(embeddings, 2, "sensitivity_index");
  if (static_cast<Eigen::Index>(labels.size()) != embeddings.rows()) {
    raise(ErrorCode::kShapeMismatch, "labels length != rows");
  }
  Moments within, between;
  visit_pairs(embeddings.rows(), pair_cap, seed, [&](Eigen::Index i, Eigen::Index j) {
    const double s = clamped_cos(embeddings, i, j);
    if (labels[static_cast<size_t>(i)] == labels[static_cast<size_t>(j)]) {
      within.add(s);
    } else {
      between.add(s);
    }
  });
  if (within.count == 0 || between.count == 0) {
    raise(ErrorCode::kDegenerateBatch,
          "need both within-class and between-class pairs");
  }
  const double pooled = 0.5 * (within.variance() + between.variance());
  if (pooled <= 0.0) {
    raise(ErrorCode::kDegenerateVariance, "similarity distributions have zero spread");
  }
  return (within.mean() - between.mean()) / std::sqrt(pooled);
}

AngleStats all_pairs_angle_stats(const Matrix& embeddings, int64_t pair_cap,
                                 uint64_t seed) {
  check_min_rows(embeddings, 2, "all_pairs_angle_stats");
  Moments angles;
  visit_pairs(embeddings.rows(), pair_cap, seed, [&](Eigen::Index i, Eigen::Index j) {
    angles.add(std::acos(clamped_cos(embeddings, i, j)) * 180.0 / M_PI);
  });
  return {angles.mean(), std::sqrt(angles.variance())};
}

AngleStats positive_pairs_angle_stats(const Matrix& embeddings,
                                      const std::vector<int64_t>& source_id) {
  check_min_rows(embeddings, 2, "positive_pairs_angle_stats");
  if (static_cast<Eigen::Index>(source_id.size()) != embeddings.rows()) {
    raise(ErrorCode::kShapeMismatch, "source_id length != rows");
  }
  Moments angles;
  for (Eigen::Index i = 0; i < embeddings.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < embeddings.rows(); ++j) {
      if (source_id[static_cast<size_t>(i)] != source_id[static_cast<size_t>(j)]) continue;
      angles.add(std::acos(clamped_cos(embeddings, i, j)) * 180.0 / M_PI);
    }
  }
  if (angles.count == 0) {
    raise(ErrorCode::kNoPositives, "no positive pairs in the batch");
  }
  return {angles.mean(), std::sqrt(angles.variance())};
}

double sparsity(const Matrix& embeddings, double tau) {
  check_min_rows(embeddings, 1, "sparsity");
  const double threshold =
      tau / std::sqrt(static_cast<double>(embeddings.cols()));
  int64_t below = 0;
  for (Eigen::Index i = 0; i < embeddings.rows(); ++i) {
    for (Eigen::Index j = 0; j < embeddings.cols(); ++j) {
      if (std::fabs(embeddings(i, j)) < threshold) ++below;
    }
  }
  return static_cast<double>(below) / static_cast<double>(embeddings.size());
}

Matrix class_centroids(const Matrix& embeddings,
                       const std::vector<int64_t>& labels) {
  if (static_cast<Eigen::Index>(labels.size()) != embeddings.rows()) {
    raise(ErrorCode::kShapeMismatch, "labels length != rows");
  }
  std::map<int64_t, std::pair<Vector, int64_t>> sums;
  for (Eigen::Index i = 0; i < embeddings.rows(); ++i) {
    auto it = sums.try_emplace(labels[static_cast<size_t>(i)],
                               Vector::Zero(embeddings.cols()), 0)
                  .first;
    it->second.first += embeddings.row(i).transpose();
    it->second.second += 1;
  }
  Matrix centroids(static_cast<Eigen::Index>(sums.size()), embeddings.cols());
  Eigen::Index row = 0;
  for (const auto& [label, entry] : sums) {
    const Vector mean = entry.first / static_cast<double>(entry.second);
    const double norm = mean.norm();
    if (norm < 1e-12) {
      raise(ErrorCode::kDegenerateBatch,
            "class " + std::to_string(label) + " centroid is the origin");
    }
    centroids.row(row++) = (mean / norm).transpose();
  }
  return centroids;
}

Matrix centroid_similarity_matrix(const Matrix& embeddings,
                                  const std::vector<int64_t>& labels) {
  const Matrix centroids = class_centroids(embeddings, labels);
  return cosine_similarity_matrix(centroids, centroids);
}

GeometryReport geometry_report(
    const Matrix& embeddings, const std::optional<std::vector<int64_t>>& labels,
    const std::optional<std::vector<int64_t>>& source_id,
    const GeometryOptions& opts) {
  GeometryReport report;
  report.anisotropy = anisotropy(embeddings);
  report.feature_correlation = feature_correlation(embeddings);
  report.center_vector_norm = center_vector_norm(embeddings);
  const auto rank = opts.use_stable_rank ? stable_rank : effective_rank;
  report.embedding_rank = rank(centered(embeddings));
  report.all_pairs =
      all_pairs_angle_stats(embeddings, opts.pair_sample_cap, opts.pair_seed);
  report.sparsity = sparsity(embeddings, opts.sparsity_tau);
  if (labels) {
    report.centroid_rank = rank(class_centroids(embeddings, *labels));
    report.d_prime = sensitivity_index(embeddings, *labels,
                                       opts.pair_sample_cap, opts.pair_seed);
  } else {
    report.centroid_rank = kNaN;
    report.d_prime = kNaN;
  }
  if (source_id) {
    report.positive_pairs = positive_pairs_angle_stats(embeddings, *source_id);
  } else {
    report.positive_pairs = {kNaN, kNaN};
  }
  return report;
}

}  // namespace hydes
