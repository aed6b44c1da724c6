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

#include "hydes/align.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "hydes/errors.hpp"

namespace hydes {

namespace {

/// Fractional ranks with average-rank ties.
Vector rank_vector(const Vector& v) {
  const Eigen::Index n = v.size();
  std::vector<Eigen::Index> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](Eigen::Index a, Eigen::Index b) { return v[a] < v[b]; });
  Vector ranks(n);
  Eigen::Index i = 0;
  while (i < n) {
    Eigen::Index j = i;
    while (j + 1 < n && v[order[static_cast<size_t>(j + 1)]] ==
                            v[order[static_cast<size_t>(i)]]) {
      ++j;
    }
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (Eigen::Index k = i; k <= j; ++k) {
      ranks[order[static_cast<size_t>(k)]] = avg;
    }
    i = j + 1;
  }
  return ranks;
}

double pearson(const Vector& x, const Vector& y) {
  const double n = static_cast<double>(x.size());
  const double mx = x.mean();
  const double my = y.mean();
  const Vector dx = x.array() - mx;
  const Vector dy = y.array() - my;
  const double vx = dx.squaredNorm() / n;
  const double vy = dy.squaredNorm() / n;
  if (vx <= 0.0 || vy <= 0.0) {
    raise(ErrorCode::kDegenerateVariance, "constant input to correlation");
  }
  return dx.dot(dy) / (n * std::sqrt(vx * vy));
}

std::string trim(const std::string& s) {
  size_t begin = 0, end = s.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
  return s.substr(begin, end - begin);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream ss(line);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

/// Mean distance between two leaf groups, accumulated in sorted leaf order.
double group_distance(const Matrix& dist, const std::vector<int>& a,
                      const std::vector<int>& b) {
  double sum = 0.0;
  for (int x : a) {
    for (int y : b) sum += dist(x, y);
  }
  return sum / (static_cast<double>(a.size()) * static_cast<double>(b.size()));
}

}  // namespace

SimilarityKind parse_similarity_kind(const std::string& name) {
  if (name == "wup") return SimilarityKind::kWup;
  if (name == "lch") return SimilarityKind::kLch;
  if (name == "minilm" || name == "text_embedding") {
    return SimilarityKind::kTextEmbedding;
  }
  raise(ErrorCode::kInvalidParam, "unknown similarity kind '" + name + "'");
}

const char* to_string(SimilarityKind kind) {
  switch (kind) {
    case SimilarityKind::kWup: return "wup";
    case SimilarityKind::kLch: return "lch";
    case SimilarityKind::kTextEmbedding: return "minilm";
  }
  return "unknown";
}

void ExternalSimilarity::validate() const {
  const Eigen::Index c = matrix.rows();
  if (c != matrix.cols() || c != static_cast<Eigen::Index>(class_names.size())) {
    raise(ErrorCode::kShapeMismatch, "similarity matrix / name count mismatch");
  }
  for (Eigen::Index i = 0; i < c; ++i) {
    for (Eigen::Index j = i + 1; j < c; ++j) {
      if (std::fabs(matrix(i, j) - matrix(j, i)) > 1e-9) {
        raise(ErrorCode::kInvalidParam, "similarity matrix is not symmetric");
      }
    }
    if (matrix(i, i) < matrix.row(i).maxCoeff() - 1e-9) {
      raise(ErrorCode::kInvalidParam,
            "similarity diagonal must be the row maximum");
    }
  }
}

Matrix ExternalSimilarity::to_distance() const {
  const double top = matrix.maxCoeff();
  Matrix dist = (top - matrix.array()).matrix();
  for (Eigen::Index i = 0; i < dist.rows(); ++i) dist(i, i) = 0.0;
  return dist;
}

ExternalSimilarity read_external_similarity_csv(const std::string& path,
                                                SimilarityKind kind) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::kIoError, "cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) {
    raise(ErrorCode::kConfigParse, path + ": empty similarity CSV");
  }
  const std::vector<std::string> header = split_csv_line(line);
  if (header.size() < 2 || header[0] != "name") {
    raise(ErrorCode::kConfigParse,
          path + ":1: header must be 'name,<class1>,...'");
  }
  ExternalSimilarity sim;
  sim.kind = kind;
  sim.class_names.assign(header.begin() + 1, header.end());
  const Eigen::Index c = static_cast<Eigen::Index>(sim.class_names.size());
  sim.matrix.resize(c, c);
  for (Eigen::Index i = 0; i < c; ++i) {
    if (!std::getline(in, line)) {
      raise(ErrorCode::kConfigParse, path + ": expected " + std::to_string(c) +
                                         " data rows, found " + std::to_string(i));
    }
    const std::vector<std::string> fields = split_csv_line(line);
    if (static_cast<Eigen::Index>(fields.size()) != c + 1) {
      raise(ErrorCode::kConfigParse,
            path + ":" + std::to_string(i + 2) + ": expected " +
                std::to_string(c + 1) + " fields");
    }
    if (fields[0] != sim.class_names[static_cast<size_t>(i)]) {
      raise(ErrorCode::kConfigParse,
            path + ":" + std::to_string(i + 2) + ": row name '" + fields[0] +
                "' does not match header order");
    }
    for (Eigen::Index j = 0; j < c; ++j) {
      char* end = nullptr;
      const std::string& cell = fields[static_cast<size_t>(j + 1)];
      sim.matrix(i, j) = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str() || *end != '\0') {
        raise(ErrorCode::kConfigParse,
              path + ":" + std::to_string(i + 2) + ": '" + cell +
                  "' is not a real number");
      }
    }
  }
  sim.validate();
  return sim;
}

double spearman(const Vector& x, const Vector& y) {
  if (x.size() != y.size()) {
    raise(ErrorCode::kLengthMismatch, "spearman inputs differ in length");
  }
  if (x.size() < 3) {
    raise(ErrorCode::kInvalidParam, "spearman needs length >= 3");
  }
  return pearson(rank_vector(x), rank_vector(y));
}

Vector upper_triangle(const Matrix& m) {
  const Eigen::Index c = m.rows();
  Vector out(c * (c - 1) / 2);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < c; ++i) {
    for (Eigen::Index j = i + 1; j < c; ++j) out[k++] = m(i, j);
  }
  return out;
}

double alignment_correlation(const Matrix& centroids,
                             const std::vector<std::string>& class_names,
                             const ExternalSimilarity& external) {
  external.validate();
  if (centroids.rows() != static_cast<Eigen::Index>(class_names.size())) {
    raise(ErrorCode::kShapeMismatch, "centroid rows != class name count");
  }
  std::map<std::string, Eigen::Index> index;
  for (size_t i = 0; i < external.class_names.size(); ++i) {
    index[external.class_names[i]] = static_cast<Eigen::Index>(i);
  }
  std::vector<Eigen::Index> order;
  order.reserve(class_names.size());
  for (const auto& name : class_names) {
    auto it = index.find(name);
    if (it == index.end()) {
      raise(ErrorCode::kClassNameMismatch,
            "class '" + name + "' absent from the external matrix");
    }
    order.push_back(it->second);
  }
  const Matrix external_dist = external.to_distance();
  const Eigen::Index c = centroids.rows();
  Vector learned(c * (c - 1) / 2), reference(c * (c - 1) / 2);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < c; ++i) {
    for (Eigen::Index j = i + 1; j < c; ++j) {
      learned[k] =
          1.0 - std::clamp(centroids.row(i).dot(centroids.row(j)), -1.0, 1.0);
      reference[k] = external_dist(order[static_cast<size_t>(i)],
                                   order[static_cast<size_t>(j)]);
      ++k;
    }
  }
  return spearman(learned, reference);
}

Dendrogram average_linkage(const Matrix& dist) {
  const Eigen::Index c = dist.rows();
  if (c != dist.cols() || c < 2) {
    raise(ErrorCode::kInvalidDistanceMatrix, "distance matrix must be square, C >= 2");
  }
  for (Eigen::Index i = 0; i < c; ++i) {
    if (dist(i, i) != 0.0) {
      raise(ErrorCode::kInvalidDistanceMatrix, "diagonal must be zero");
    }
    for (Eigen::Index j = 0; j < c; ++j) {
      if (dist(i, j) < 0.0) {
        raise(ErrorCode::kInvalidDistanceMatrix, "distances must be nonnegative");
      }
      if (std::fabs(dist(i, j) - dist(j, i)) > 1e-12) {
        raise(ErrorCode::kInvalidDistanceMatrix, "distance matrix is not symmetric");
      }
    }
  }

  Dendrogram out;
  out.leaf_count = static_cast<int>(c);
  // Active clusters keyed by creation id; members kept sorted so the
  // leaf-pair sums are accumulated in a reproducible order.
  std::map<int, std::vector<int>> active;
  for (int i = 0; i < c; ++i) active[i] = {i};

  int next_id = static_cast<int>(c);
  while (active.size() > 1) {
    double best = std::numeric_limits<double>::infinity();
    int best_i = -1, best_j = -1;
    for (auto a = active.begin(); a != active.end(); ++a) {
      for (auto b = std::next(a); b != active.end(); ++b) {
        const double d = group_distance(dist, a->second, b->second);
        if (d < best) {
          best = d;
          best_i = a->first;
          best_j = b->first;
        }
      }
    }
    std::vector<int> merged = active[best_i];
    merged.insert(merged.end(), active[best_j].begin(), active[best_j].end());
    std::sort(merged.begin(), merged.end());
    active.erase(best_i);
    active.erase(best_j);
    active[next_id++] = std::move(merged);
    out.merges.push_back({best_i, best_j, best});
  }
  return out;
}

Matrix cophenetic_matrix(const Dendrogram& dendrogram) {
  const int c = dendrogram.leaf_count;
  if (static_cast<int>(dendrogram.merges.size()) != c - 1) {
    raise(ErrorCode::kInvalidParam, "dendrogram must hold C - 1 merges");
  }
  std::map<int, std::vector<int>> members;
  for (int i = 0; i < c; ++i) members[i] = {i};
  Matrix out = Matrix::Zero(c, c);
  int next_id = c;
  for (const auto& merge : dendrogram.merges) {
    const auto& left = members.at(merge.left);
    const auto& right = members.at(merge.right);
    for (int x : left) {
      for (int y : right) {
        out(x, y) = merge.height;
        out(y, x) = merge.height;
      }
    }
    std::vector<int> merged = left;
    merged.insert(merged.end(), right.begin(), right.end());
    members.erase(merge.left);
    members.erase(merge.right);
    members[next_id++] = std::move(merged);
  }
  return out;
}

double cophenetic_correlation(const Dendrogram& dendrogram,
                              const Matrix& external_dist) {
  const Matrix coph = cophenetic_matrix(dendrogram);
  if (coph.rows() != external_dist.rows() || coph.cols() != external_dist.cols()) {
    raise(ErrorCode::kShapeMismatch, "external distance matrix size mismatch");
  }
  return spearman(upper_triangle(coph), upper_triangle(external_dist));
}

double cophenetic_correlation_pearson(const Dendrogram& dendrogram,
                                      const Matrix& external_dist) {
  const Matrix coph = cophenetic_matrix(dendrogram);
  if (coph.rows() != external_dist.rows() || coph.cols() != external_dist.cols()) {
    raise(ErrorCode::kShapeMismatch, "external distance matrix size mismatch");
  }
  return pearson(upper_triangle(coph), upper_triangle(external_dist));
}

}  // namespace hydes
