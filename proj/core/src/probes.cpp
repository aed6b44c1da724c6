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

#include "hydes/probes.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "hydes/errors.hpp"
#include "hydes/rng.hpp"

namespace hydes {

namespace {

int class_count(const LabeledEmbeddings& train, const LabeledEmbeddings& test) {
  int max_label = -1;
  for (int l : train.labels) max_label = std::max(max_label, l);
  for (int l : test.labels) max_label = std::max(max_label, l);
  if (max_label < 1) {
    raise(ErrorCode::kInvalidParam, "probes need at least two classes");
  }
  return max_label + 1;
}

void check_dims(const LabeledEmbeddings& train, const LabeledEmbeddings& test) {
  if (train.embeddings.cols() != test.embeddings.cols()) {
    raise(ErrorCode::kDimensionMismatch, "train/test embedding dims differ");
  }
  if (train.size() != static_cast<Eigen::Index>(train.labels.size()) ||
      test.size() != static_cast<Eigen::Index>(test.labels.size())) {
    raise(ErrorCode::kShapeMismatch, "labels length != embedding rows");
  }
  if (train.size() == 0 || test.size() == 0) {
    raise(ErrorCode::kEmptyInput, "probe split is empty");
  }
}

/// Ranks classes by (score desc, class index asc) and reports whether the
/// true label is first / within the top min(5, C).
void score_to_hits(const Vector& scores, int truth, int n_classes, int* hit1,
                   int* hit5) {
  std::vector<int> order(static_cast<size_t>(n_classes));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  });
  if (order[0] == truth) ++*hit1;
  const int top_k = std::min(5, n_classes);
  for (int r = 0; r < top_k; ++r) {
    if (order[static_cast<size_t>(r)] == truth) {
      ++*hit5;
      break;
    }
  }
}

Matrix normalized_rows(const Matrix& m) {
  Matrix out = m;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const double norm = m.row(i).norm();
    if (norm > 1e-12) out.row(i) /= norm;
  }
  return out;
}

}  // namespace

ProbeResult linear_probe(const LabeledEmbeddings& train,
                         const LabeledEmbeddings& test,
                         const LinearProbeConfig& config) {
  check_dims(train, test);
  const int n_classes = class_count(train, test);
  std::vector<int> seen(static_cast<size_t>(n_classes), 0);
  for (int l : train.labels) seen[static_cast<size_t>(l)] = 1;
  for (int c = 0; c < n_classes; ++c) {
    if (!seen[static_cast<size_t>(c)]) {
      raise(ErrorCode::kClassMissingInTrain,
            "class " + std::to_string(c) + " absent from the train split");
    }
  }

  const Eigen::Index n = train.size();
  const Eigen::Index d = train.embeddings.cols();
  Matrix w = Matrix::Zero(n_classes, d);
  Vector b = Vector::Zero(n_classes);
  Matrix mw = Matrix::Zero(n_classes, d), vw = Matrix::Zero(n_classes, d);
  Vector mb = Vector::Zero(n_classes), vb = Vector::Zero(n_classes);

  for (int step = 1; step <= config.epochs; ++step) {
    Matrix logits = train.embeddings * w.transpose();
    logits.rowwise() += b.transpose();
    // Softmax with per-row max shift; gradient of mean cross-entropy.
    Matrix probs(n, n_classes);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double m = logits.row(i).maxCoeff();
      probs.row(i) = (logits.row(i).array() - m).exp();
      probs.row(i) /= probs.row(i).sum();
      probs(i, train.labels[static_cast<size_t>(i)]) -= 1.0;
    }
    probs /= static_cast<double>(n);
    const Matrix gw = probs.transpose() * train.embeddings;
    const Vector gb = probs.colwise().sum().transpose();

    const double bc1 = 1.0 - std::pow(config.adam_beta1, step);
    const double bc2 = 1.0 - std::pow(config.adam_beta2, step);
    mw = config.adam_beta1 * mw + (1.0 - config.adam_beta1) * gw;
    vw = config.adam_beta2 * vw + (1.0 - config.adam_beta2) * gw.cwiseProduct(gw);
    w -= config.learning_rate * config.weight_decay * w;
    w -= (config.learning_rate * (mw / bc1).array() /
          ((vw / bc2).array().sqrt() + config.adam_eps))
             .matrix();
    mb = config.adam_beta1 * mb + (1.0 - config.adam_beta1) * gb;
    vb = config.adam_beta2 * vb + (1.0 - config.adam_beta2) * gb.cwiseProduct(gb);
    b -= config.learning_rate * config.weight_decay * b;
    b -= (config.learning_rate * (mb / bc1).array() /
          ((vb / bc2).array().sqrt() + config.adam_eps))
             .matrix();
  }

  int hit1 = 0, hit5 = 0;
  for (Eigen::Index i = 0; i < test.size(); ++i) {
    const Vector scores = w * test.embeddings.row(i).transpose() + b;
    score_to_hits(scores, test.labels[static_cast<size_t>(i)], n_classes, &hit1,
                  &hit5);
  }
  const double denom = static_cast<double>(test.size());
  return {hit1 / denom, hit5 / denom};
}

ProbeResult knn_probe(const LabeledEmbeddings& train,
                      const LabeledEmbeddings& test, int k) {
  check_dims(train, test);
  if (k < 1) raise(ErrorCode::kInvalidParam, "k must be >= 1");
  if (k > train.size()) {
    raise(ErrorCode::kKTooLarge, "k = " + std::to_string(k) + " exceeds " +
                                     std::to_string(train.size()) +
                                     " train points");
  }
  const int n_classes = class_count(train, test);
  const Matrix train_unit = normalized_rows(train.embeddings);
  const Matrix test_unit = normalized_rows(test.embeddings);
  const Matrix sims = cosine_similarity_matrix(test_unit, train_unit);

  int hit1 = 0, hit5 = 0;
  std::vector<Eigen::Index> order(static_cast<size_t>(train.size()));
  for (Eigen::Index i = 0; i < test.size(); ++i) {
    std::iota(order.begin(), order.end(), 0);
    std::partial_sort(order.begin(), order.begin() + k, order.end(),
                      [&](Eigen::Index a, Eigen::Index b) {
                        if (sims(i, a) != sims(i, b)) return sims(i, a) > sims(i, b);
                        return a < b;
                      });
    Vector scores = Vector::Zero(n_classes);
    for (int r = 0; r < k; ++r) {
      const Eigen::Index j = order[static_cast<size_t>(r)];
      scores[train.labels[static_cast<size_t>(j)]] += sims(i, j);
    }
    score_to_hits(scores, test.labels[static_cast<size_t>(i)], n_classes, &hit1,
                  &hit5);
  }
  const double denom = static_cast<double>(test.size());
  return {hit1 / denom, hit5 / denom};
}

SplitIndices stratified_split(const std::vector<int>& labels,
                              double train_fraction, uint64_t seed) {
  if (train_fraction <= 0.0 || train_fraction >= 1.0) {
    raise(ErrorCode::kInvalidParam, "train_fraction must be inside (0, 1)");
  }
  int n_classes = 0;
  for (int l : labels) n_classes = std::max(n_classes, l + 1);
  std::vector<std::vector<Eigen::Index>> per_class(static_cast<size_t>(n_classes));
  for (size_t i = 0; i < labels.size(); ++i) {
    per_class[static_cast<size_t>(labels[i])].push_back(
        static_cast<Eigen::Index>(i));
  }
  SplitIndices split;
  Rng rng(derive_seed(seed, 0x5B717ULL));
  for (auto& members : per_class) {
    if (members.empty()) continue;
    rng.shuffle(members);
    const size_t n_train = std::max<size_t>(
        1, static_cast<size_t>(std::lround(train_fraction * members.size())));
    for (size_t i = 0; i < members.size(); ++i) {
      (i < n_train ? split.train : split.test).push_back(members[i]);
    }
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

}  // namespace hydes
