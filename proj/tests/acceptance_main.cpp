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

// Acceptance suite: one numbered criterion per function, each printing a
// single PASS/FAIL line. Run everything with no arguments or one criterion
// with --criterion N. The process exits with the number of failed gating
// criteria.

#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "hydes/align.hpp"
#include "hydes/datastore.hpp"
#include "hydes/errors.hpp"
#include "hydes/geometry.hpp"
#include "hydes/model.hpp"
#include "hydes/probes.hpp"
#include "hydes/sphere.hpp"
#include "hydes/views.hpp"
#include "oracles.hpp"

using namespace hydes;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

bool report(int criterion, bool pass, const std::string& detail) {
  std::cout << (pass ? "[PASS]" : "[FAIL]") << " criterion " << criterion << ": "
            << detail << std::endl;
  return pass;
}

EmbeddingBatch random_batch(Eigen::Index n, Eigen::Index dim, Rng& rng) {
  EmbeddingBatch batch;
  batch.rows = oracles::random_unit_rows(n, dim, rng);
  // Sources of 2-4 views each so every positive set is nonempty.
  int64_t source = 0;
  Eigen::Index placed = 0;
  while (placed < n) {
    Eigen::Index group = 2 + static_cast<Eigen::Index>(rng.uniform_index(3));
    group = std::min(group, n - placed);
    if (group == 1) {  // attach a trailing singleton to the previous source
      batch.source_id.push_back(source - 1);
      ++placed;
      break;
    }
    for (Eigen::Index v = 0; v < group; ++v) batch.source_id.push_back(source);
    ++source;
    placed += group;
  }
  return batch;
}

// ---------------------------------------------------------- criterion 1 --
// Analytic gradient vs central finite differences over the full grid of
// batch shapes, concentrations, and loss weights.
bool criterion_gradient() {
  const auto start = Clock::now();
  Rng rng(0xC1);
  const int n_grid[] = {8, 24};
  const int d_grid[] = {4, 16};
  const double kappa_grid[] = {0.5, 5.0, 20.0};
  const double weight_grid[] = {0.0, 0.5, 1.0};

  double worst = 0.0;
  for (int config = 0; config < 50; ++config) {
    const int n = n_grid[rng.uniform_index(2)];
    const int d = d_grid[rng.uniform_index(2)];
    const double kappa = kappa_grid[rng.uniform_index(3)];
    const LossWeights weights{weight_grid[rng.uniform_index(3)],
                              weight_grid[rng.uniform_index(3)]};
    const KernelParams params = KernelParams::create(kappa, d);
    const EmbeddingBatch batch = random_batch(n, d, rng);

    const Matrix grad = mi_gradient(batch, params, weights);
    const double scale = std::max(grad.cwiseAbs().maxCoeff(), 1e-10);
    const double h = 1e-5;
    for (Eigen::Index i = 0; i < batch.size(); ++i) {
      for (Eigen::Index j = 0; j < d; ++j) {
        EmbeddingBatch plus = batch;
        plus.rows(i, j) += h;
        EmbeddingBatch minus = batch;
        minus.rows(i, j) -= h;
        const double fd = (mi_objective(plus, params, weights).training_loss -
                           mi_objective(minus, params, weights).training_loss) /
                          (2.0 * h);
        worst = std::max(worst, std::fabs(fd - grad(i, j)) / scale);
      }
    }
  }
  const double elapsed = seconds_since(start);
  std::ostringstream detail;
  detail << "gradient vs finite differences, 50 configs: max scaled error "
         << worst << " (tol 1e-5), " << elapsed << " s (cap 30)";
  return report(1, worst < 1e-5 && elapsed < 30.0, detail.str());
}

// ---------------------------------------------------------- criterion 2 --
// Entropy estimator vs the Monte-Carlo oracle of the true density. A
// fixed-bandwidth leave-one-out KDE converges to the cross-entropy
// H(p, p*K), i.e. it carries the smoothing bias KL(p || p*K), which
// exceeds the 0.1-nat tolerance at this configuration. The check runs at
// the stated tolerance anyway and prints the quadrature-predicted bias so
// the failure is attributable: the measured gap must match the prediction.
bool criterion_entropy_consistency() {
  const auto start = Clock::now();
  const int dim = 4, n = 4096;
  const double kappa = 4.0;
  const KernelParams params = KernelParams::create(kappa, dim);

  Rng rng(0xC2);
  Vector mu = Vector::Zero(dim);
  mu[0] = 1.0;
  EmbeddingBatch batch;
  batch.rows.resize(n, dim);
  for (int i = 0; i < n; ++i) {
    batch.rows.row(i) = sample_vmf(mu, kappa, rng).transpose();
  }
  batch.source_id.assign(n, 0);
  const double h_hat = global_entropy(batch, params);

  double mc_sum = 0.0;
  const int64_t fresh = 1000000;
  for (int64_t i = 0; i < fresh; ++i) {
    const Vector x = sample_vmf(mu, kappa, rng);
    mc_sum += params.log_norm_const + kappa * x.dot(mu);
  }
  const double h_mc = -mc_sum / static_cast<double>(fresh);
  const double gap = std::fabs(h_hat - h_mc);

  // Predicted asymptotic bias of the fixed-bandwidth estimator:
  // KL(p || p*K) with (p*K)(x) = C(k)^2 / C(2k cos(theta/2)).
  const double log_c = params.log_norm_const;
  const int steps = 20000;
  double zt = 0.0, cross = 0.0;
  for (int i = 0; i < steps; ++i) {
    const double t = -1.0 + 2.0 * (i + 0.5) / steps;
    const double density = std::sqrt(1.0 - t * t) * std::exp(kappa * t);
    const double keff = 2.0 * kappa * std::sqrt(0.5 * (1.0 + t));
    zt += density;
    cross += density * (2.0 * log_c - log_vmf_normalizer(keff, dim));
  }
  const double h_limit = -cross / zt;
  const double predicted_bias =
      h_limit - (-log_c - kappa * vmf_mean_resultant_length(dim, kappa));

  // Informational: the same estimator with a bandwidth suited to N = 4096
  // (sharper kernel, smaller smoothing bias, variance still controlled).
  const double h_sharp =
      global_entropy(batch, KernelParams::create(20.0, dim));

  const double elapsed = seconds_since(start);
  std::ostringstream detail;
  detail << "|H_kde - H_mc| = " << gap << " (tol 0.1 nats), H_kde = " << h_hat
         << ", H_mc = " << h_mc
         << "; fixed-bandwidth smoothing bias predicted by quadrature = "
         << predicted_bias << " (matches the gap up to the O(1/N) term); "
         << "same estimator at bandwidth 20 gives |gap| = "
         << std::fabs(h_sharp - h_mc) << " (informational); " << elapsed
         << " s (cap 60)";
  return report(2, gap < 0.1 && elapsed < 60.0, detail.str());
}

// ---------------------------------------------------------- criterion 3 --
bool criterion_cancellation_invariance() {
  Rng rng(0xC3);
  double worst_cancel = 0.0, worst_rot = 0.0, worst_perm = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int dim = 4 + static_cast<int>(rng.uniform_index(8));
    const EmbeddingBatch batch =
        random_batch(6 + static_cast<Eigen::Index>(rng.uniform_index(10)), dim, rng);
    const double kappa = rng.uniform(0.2, 15.0);
    const double ab = rng.uniform(0.1, 2.0);
    const KernelParams with_c = KernelParams::create(kappa, dim, true);
    const KernelParams no_c = KernelParams::create(kappa, dim, false);
    const LossWeights equal{ab, ab};
    worst_cancel = std::max(
        worst_cancel, std::fabs(mi_objective(batch, with_c, equal).mi_objective -
                                mi_objective(batch, no_c, equal).mi_objective));

    const LossWeights weights{rng.uniform(0.0, 1.5), rng.uniform(0.0, 1.5)};
    const Matrix q = oracles::random_orthogonal(dim, rng);
    EmbeddingBatch rotated = batch;
    rotated.rows = batch.rows * q.transpose();
    worst_rot = std::max(
        worst_rot, std::fabs(mi_objective(batch, with_c, weights).mi_objective -
                             mi_objective(rotated, with_c, weights).mi_objective));

    std::vector<Eigen::Index> perm(static_cast<size_t>(batch.size()));
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(perm);
    EmbeddingBatch shuffled = batch;
    for (Eigen::Index i = 0; i < batch.size(); ++i) {
      shuffled.rows.row(i) = batch.rows.row(perm[static_cast<size_t>(i)]);
      shuffled.source_id[static_cast<size_t>(i)] =
          batch.source_id[static_cast<size_t>(perm[static_cast<size_t>(i)])];
    }
    worst_perm = std::max(
        worst_perm, std::fabs(mi_objective(batch, with_c, weights).mi_objective -
                              mi_objective(shuffled, with_c, weights).mi_objective));
  }
  std::ostringstream detail;
  detail << "const cancellation " << worst_cancel << " (tol 1e-12), rotation "
         << worst_rot << " (tol 1e-10), permutation " << worst_perm
         << " (tol 1e-12), 100 trials";
  return report(3, worst_cancel < 1e-12 && worst_rot < 1e-10 && worst_perm < 1e-12,
                detail.str());
}

// ---------------------------------------------------------- criterion 4 --
bool criterion_normalizer() {
  double worst_closed = 0.0;
  for (double k : {1e-3, 0.1, 1.0, 10.0, 100.0}) {
    const double log_sinh = k > 30.0
                                ? k - M_LN2 + std::log1p(-std::exp(-2.0 * k))
                                : std::log(std::sinh(k));
    const double want = std::log(k) - std::log(4.0 * M_PI) - log_sinh;
    worst_closed = std::max(worst_closed, std::fabs(log_vmf_normalizer(k, 3) - want));
  }

  Rng rng(0xC4);
  double worst_sigma = 0.0;
  for (int dim : {2, 3, 8}) {
    for (double kappa : {0.5, 5.0}) {
      const KernelParams params = KernelParams::create(kappa, dim);
      const double log_area = log_sphere_surface_area(dim);
      Vector mu = Vector::Zero(dim);
      mu[0] = 1.0;
      const int64_t n = 1000000;
      double sum = 0.0, sum_sq = 0.0;
      for (int64_t i = 0; i < n; ++i) {
        const double s = sample_uniform_sphere(dim, rng).dot(mu);
        const double w = std::exp(log_area + log_vmf_kernel(s, params));
        sum += w;
        sum_sq += w * w;
      }
      const double mean = sum / static_cast<double>(n);
      const double se = std::sqrt(
          std::max(1e-30, sum_sq / static_cast<double>(n) - mean * mean) /
          static_cast<double>(n));
      worst_sigma = std::max(worst_sigma, std::fabs(mean - 1.0) / se);
    }
  }
  std::ostringstream detail;
  detail << "closed-form max error " << worst_closed
         << " (tol 1e-9); kernel MC integration worst deviation " << worst_sigma
         << " sigma (tol 3)";
  return report(4, worst_closed < 1e-9 && worst_sigma < 3.0, detail.str());
}

// ---------------------------------------------------------- criterion 5 --
// Free-embedding collapse dichotomy. Thresholds frozen after the
// calibration run: alignment-only training from a concentrated start stays
// collapsed, the balanced objective expands to at least half of
// min(sources, D) effective dimensions.
bool criterion_collapse_dichotomy() {
  FreeEmbedConfig base;
  base.n_sources = 32;
  base.views_per_source = 4;
  base.dim = 16;
  base.init = FreeInit::kConcentratedSpot;
  base.init_sigma = 0.01;
  base.kappa = 10.0;
  base.steps = 600;
  base.learning_rate = 3e-3;
  base.seed = 0xC5;

  auto alignment_cosine = [](const FreeEmbedResult& r, int n_sources, int views) {
    double acc = 0.0;
    int64_t count = 0;
    for (int s = 0; s < n_sources; ++s) {
      for (int a = 0; a < views; ++a) {
        for (int b = a + 1; b < views; ++b) {
          acc += r.embeddings.row(s * views + a).dot(r.embeddings.row(s * views + b));
          ++count;
        }
      }
    }
    return acc / static_cast<double>(count);
  };

  FreeEmbedConfig collapse = base;
  collapse.alpha = 0.0;
  collapse.beta = 1.0;
  const FreeEmbedResult collapsed = train_free_embeddings(collapse);
  const double collapsed_rank = effective_rank(collapsed.embeddings);
  const double collapsed_align = alignment_cosine(collapsed, 32, 4);

  FreeEmbedConfig balanced = base;
  balanced.alpha = 1.0;
  balanced.beta = 1.0;
  const FreeEmbedResult expanded = train_free_embeddings(balanced);
  const double expanded_rank = effective_rank(expanded.embeddings);
  const double expanded_align = alignment_cosine(expanded, 32, 4);

  const double rank_floor = 0.5 * std::min(32, 16);
  const bool pass = collapsed_rank < 2.0 && collapsed_align > 0.999 &&
                    expanded_rank >= rank_floor && expanded_align > 0.9;
  std::ostringstream detail;
  detail << "alpha=0: rank " << collapsed_rank << " (< 2), align "
         << collapsed_align << " (> 0.999); alpha=beta=1: rank " << expanded_rank
         << " (>= " << rank_floor << "), align " << expanded_align << " (> 0.9)";
  return report(5, pass, detail.str());
}

// ------------------------------------------------- criteria 6 and 7 glue --
struct SslRun {
  TrainResult result;
  VectorDataset dataset;
};

SslRun run_toy_ssl(double kappa, int epochs, bool probe_every_epoch) {
  SyntheticSpec spec;  // defaults: 3 classes x 200, dim 16
  spec.seed = 1;
  SslRun run{{}, generate_synthetic(spec)};
  ViewRecipe recipe;  // 2 global + 6 local
  // Deep narrow encoder: its random init scrambles the input geometry
  // (probe accuracy ~0.48 at step 0), leaving a genuine early-learning
  // window for the epoch-5 comparison of criterion 7.
  EncoderConfig ec;
  ec.input_dim = spec.dim;
  ec.hidden_dims = {24, 24, 24, 24, 24, 24};
  ec.projector_dim = 16;
  ec.seed = 7;
  TrainConfig tc;
  tc.batch_size = 64;
  tc.learning_rate = 1e-3;
  tc.epochs = epochs;
  tc.kappa = kappa;
  tc.seed = 42;

  EpochCallback callback;
  if (probe_every_epoch) {
    callback = [&run](int, const EncoderState& state, EpochLog& log) {
      const Matrix z = embed(state, run.dataset.samples);
      std::vector<int> labels(run.dataset.labels.begin(), run.dataset.labels.end());
      const SplitIndices split = stratified_split(labels, 0.8, 5);
      LabeledEmbeddings train_set, test_set;
      train_set.embeddings.resize(static_cast<Eigen::Index>(split.train.size()),
                                  z.cols());
      test_set.embeddings.resize(static_cast<Eigen::Index>(split.test.size()),
                                 z.cols());
      for (size_t i = 0; i < split.train.size(); ++i) {
        train_set.embeddings.row(static_cast<Eigen::Index>(i)) =
            z.row(split.train[i]);
        train_set.labels.push_back(labels[static_cast<size_t>(split.train[i])]);
      }
      for (size_t i = 0; i < split.test.size(); ++i) {
        test_set.embeddings.row(static_cast<Eigen::Index>(i)) = z.row(split.test[i]);
        test_set.labels.push_back(labels[static_cast<size_t>(split.test[i])]);
      }
      const ProbeResult linear = linear_probe(train_set, test_set);
      log.probe_top1 = linear.top1;
      log.probe_top5 = linear.top5;
    };
  }
  run.result = train(run.dataset, recipe, tc, ec, callback);
  return run;
}

// ---------------------------------------------------------- criterion 6 --
bool criterion_toy_ssl() {
  const auto start = Clock::now();
  SslRun run = run_toy_ssl(2.0, 50, false);

  const Matrix z = embed(run.result.state, run.dataset.samples);
  std::vector<int> labels(run.dataset.labels.begin(), run.dataset.labels.end());
  const SplitIndices split = stratified_split(labels, 0.8, 5);
  LabeledEmbeddings train_set, test_set;
  train_set.embeddings.resize(static_cast<Eigen::Index>(split.train.size()), z.cols());
  test_set.embeddings.resize(static_cast<Eigen::Index>(split.test.size()), z.cols());
  for (size_t i = 0; i < split.train.size(); ++i) {
    train_set.embeddings.row(static_cast<Eigen::Index>(i)) = z.row(split.train[i]);
    train_set.labels.push_back(labels[static_cast<size_t>(split.train[i])]);
  }
  for (size_t i = 0; i < split.test.size(); ++i) {
    test_set.embeddings.row(static_cast<Eigen::Index>(i)) = z.row(split.test[i]);
    test_set.labels.push_back(labels[static_cast<size_t>(split.test[i])]);
  }
  const ProbeResult linear = linear_probe(train_set, test_set);
  const ProbeResult knn = knn_probe(train_set, test_set, 20);
  const double elapsed = seconds_since(start);

  std::ostringstream detail;
  detail << "50-epoch toy SSL: linear top1 " << linear.top1 << ", knn top1 "
         << knn.top1 << " (both > 0.90 vs 0.33 chance), " << elapsed
         << " s (cap 300)";
  return report(6, linear.top1 > 0.90 && knn.top1 > 0.90 && elapsed < 300.0,
                detail.str());
}

// ---------------------------------------------------------- criterion 7 --
bool criterion_kappa_trend() {
  SslRun high = run_toy_ssl(20.0, 5, true);
  SslRun low = run_toy_ssl(0.1, 5, true);
  const double acc_high = high.result.log.back().probe_top1;
  const double acc_low = low.result.log.back().probe_top1;
  const double margin = acc_high - acc_low;

  std::ostringstream detail;
  detail << "epoch-5 linear top1: kappa=20 -> " << acc_high << ", kappa=0.1 -> "
         << acc_low << ", margin " << margin;
  if (std::fabs(margin) < 0.02) {
    detail << " (< 2 points: non-gating, reported)";
    return report(7, true, detail.str());
  }
  detail << (margin > 0 ? " (larger kappa accelerates early accuracy)"
                        : " (trend reversed)");
  return report(7, margin > 0, detail.str());
}

// ---------------------------------------------------------- criterion 8 --
bool criterion_oracle_parity() {
  Rng rng(0xC8);
  double worst = 0.0;
  for (int trial = 0; trial < 8; ++trial) {
    const Eigen::Index n = 30 + static_cast<Eigen::Index>(rng.uniform_index(71));
    const Eigen::Index d = 3 + static_cast<Eigen::Index>(rng.uniform_index(8));
    const Matrix z = oracles::random_unit_rows(n, d, rng);
    std::vector<int64_t> labels;
    for (Eigen::Index i = 0; i < n; ++i) {
      labels.push_back(static_cast<int64_t>(rng.uniform_index(4)));
    }

    worst = std::max(worst, std::fabs(anisotropy(z) - oracles::anisotropy_reference(z)));
    worst = std::max(worst, std::fabs(feature_correlation(z) -
                                      oracles::feature_correlation_reference(z)));
    double mean_norm = 0.0;
    {
      Vector mean = Vector::Zero(d);
      for (Eigen::Index i = 0; i < n; ++i) mean += z.row(i).transpose();
      mean_norm = (mean / static_cast<double>(n)).norm();
    }
    worst = std::max(worst, std::fabs(center_vector_norm(z) - mean_norm));
    const Matrix centered = z.rowwise() - z.colwise().mean();
    worst = std::max(worst, std::fabs(effective_rank(centered) -
                                      oracles::effective_rank_reference(centered)));
    worst = std::max(worst, std::fabs(sensitivity_index(z, labels) -
                                      oracles::d_prime_reference(z, labels)));
    const AngleStats angles = all_pairs_angle_stats(z);
    const auto [want_mean, want_std] = oracles::angle_stats_reference(z);
    worst = std::max(worst, std::fabs(angles.mean_deg - want_mean));
    worst = std::max(worst, std::fabs(angles.std_deg - want_std));

    // Sparsity and positive-pair angles against plain counting loops.
    {
      const double tau = 0.01;
      const double threshold = tau / std::sqrt(static_cast<double>(d));
      int64_t below = 0;
      for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
          below += std::fabs(z(i, j)) < threshold;
        }
      }
      const double want = static_cast<double>(below) / static_cast<double>(n * d);
      worst = std::max(worst, std::fabs(sparsity(z, tau) - want));

      std::vector<int64_t> sources;
      for (Eigen::Index i = 0; i < n; ++i) sources.push_back(i / 2);
      std::vector<double> pos_angles;
      for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
          if (sources[static_cast<size_t>(i)] != sources[static_cast<size_t>(j)]) continue;
          const double s = std::clamp(z.row(i).dot(z.row(j)), -1.0, 1.0);
          pos_angles.push_back(std::acos(s) * 180.0 / M_PI);
        }
      }
      double mean = 0.0;
      for (double a : pos_angles) mean += a;
      mean /= static_cast<double>(pos_angles.size());
      const AngleStats pos = positive_pairs_angle_stats(z, sources);
      worst = std::max(worst, std::fabs(pos.mean_deg - mean));
    }

    // Alignment metrics against the naive rank implementation.
    Vector x(n), y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      x[i] = rng.uniform(-1, 1);
      y[i] = rng.uniform(-1, 1);
    }
    std::vector<double> xs(x.data(), x.data() + n), ys(y.data(), y.data() + n);
    worst = std::max(worst,
                     std::fabs(spearman(x, y) - oracles::spearman_reference(xs, ys)));

    // alignment_correlation and cophenetic_correlation against naive
    // compositions of the reference pieces.
    {
      const Eigen::Index c = 6;
      const Matrix centroids = oracles::random_unit_rows(c, d, rng);
      std::vector<std::string> names;
      for (Eigen::Index i = 0; i < c; ++i) names.push_back("k" + std::to_string(i));
      ExternalSimilarity external;
      external.class_names = names;
      external.kind = SimilarityKind::kWup;
      external.matrix = Matrix::Zero(c, c);
      for (Eigen::Index i = 0; i < c; ++i) {
        external.matrix(i, i) = 1.0;
        for (Eigen::Index j = i + 1; j < c; ++j) {
          const double v = rng.uniform(0.0, 0.95);
          external.matrix(i, j) = v;
          external.matrix(j, i) = v;
        }
      }
      const double top = external.matrix.maxCoeff();
      std::vector<double> learned, reference;
      for (Eigen::Index i = 0; i < c; ++i) {
        for (Eigen::Index j = i + 1; j < c; ++j) {
          learned.push_back(
              1.0 - std::clamp(centroids.row(i).dot(centroids.row(j)), -1.0, 1.0));
          reference.push_back(top - external.matrix(i, j));
        }
      }
      worst = std::max(
          worst, std::fabs(alignment_correlation(centroids, names, external) -
                           oracles::spearman_reference(learned, reference)));

      Matrix learned_dist = Matrix::Zero(c, c);
      for (Eigen::Index i = 0; i < c; ++i) {
        for (Eigen::Index j = 0; j < c; ++j) {
          if (i != j) {
            learned_dist(i, j) =
                1.0 - std::clamp(centroids.row(i).dot(centroids.row(j)), -1.0, 1.0);
          }
        }
      }
      learned_dist = 0.5 * (learned_dist + learned_dist.transpose());
      const Dendrogram dendro = average_linkage(learned_dist);
      const auto ref_merges = oracles::upgma_reference(learned_dist);
      // Naive cophenetic distances from the reference merges.
      Matrix ref_coph = Matrix::Zero(c, c);
      {
        std::map<int, std::vector<int>> members;
        for (int i = 0; i < c; ++i) members[i] = {i};
        int next_id = static_cast<int>(c);
        for (const auto& merge : ref_merges) {
          for (int a : members.at(merge.left)) {
            for (int b : members.at(merge.right)) {
              ref_coph(a, b) = ref_coph(b, a) = merge.height;
            }
          }
          std::vector<int> merged = members.at(merge.left);
          merged.insert(merged.end(), members.at(merge.right).begin(),
                        members.at(merge.right).end());
          members.erase(merge.left);
          members.erase(merge.right);
          members[next_id++] = std::move(merged);
        }
      }
      Matrix ext_dist = (external.matrix.maxCoeff() - external.matrix.array()).matrix();
      for (Eigen::Index i = 0; i < c; ++i) ext_dist(i, i) = 0.0;
      std::vector<double> coph_ut, ext_ut;
      for (Eigen::Index i = 0; i < c; ++i) {
        for (Eigen::Index j = i + 1; j < c; ++j) {
          coph_ut.push_back(ref_coph(i, j));
          ext_ut.push_back(ext_dist(i, j));
        }
      }
      worst = std::max(worst,
                       std::fabs(cophenetic_correlation(dendro, ext_dist) -
                                 oracles::spearman_reference(coph_ut, ext_ut)));
    }
  }

  // UPGMA: exact merge parity on all 5-leaf instances from 100 random
  // metrics.
  bool upgma_exact = true;
  for (int trial = 0; trial < 100; ++trial) {
    Matrix dist = Matrix::Zero(5, 5);
    for (int i = 0; i < 5; ++i) {
      for (int j = i + 1; j < 5; ++j) {
        const double v = rng.uniform(0.05, 3.0);
        dist(i, j) = v;
        dist(j, i) = v;
      }
    }
    const Dendrogram got = average_linkage(dist);
    const auto want = oracles::upgma_reference(dist);
    for (size_t m = 0; m < want.size(); ++m) {
      upgma_exact &= got.merges[m].left == want[m].left &&
                     got.merges[m].right == want[m].right &&
                     got.merges[m].height == want[m].height;
    }
  }

  std::ostringstream detail;
  detail << "geometry/alignment brute-force parity: max abs deviation " << worst
         << " (tol 1e-9); UPGMA 5-leaf x100 exact: "
         << (upgma_exact ? "yes" : "no");
  return report(8, worst < 1e-9 && upgma_exact, detail.str());
}

// ---------------------------------------------------------- criterion 9 --
bool criterion_determinism_roundtrips() {
  const fs::path dir = fs::temp_directory_path() / "hydes_acceptance_c9";
  fs::remove_all(dir);
  fs::create_directories(dir);
  auto in_dir = [&](const std::string& name) { return (dir / name).string(); };

  std::ofstream(in_dir("train.ini")) << R"(
[dataset]
kind = synthetic
n_classes = 3
samples_per_class = 30
dim = 10
seed = 1

[views]
n_global = 2
n_local = 2

[encoder]
hidden_dims = 16
projector_dim = 8
seed = 7

[train]
batch_size = 16
epochs = 2
kappa = 2.0
seed = 42

[probe]
enabled = true
kind = knn
)";
  auto run_cli = [&](const std::string& args, const std::string& tag) {
    const std::string cmd = std::string(HYDES_CLI_PATH) + " " + args + " > " +
                            in_dir(tag + ".out") + " 2>&1";
    return WEXITSTATUS(std::system(cmd.c_str()));
  };
  auto slurp = [](const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
  };

  bool pass = true;
  std::ostringstream detail;
  pass &= run_cli("train --config " + in_dir("train.ini") + " --out " + in_dir("a"),
                  "a") == 0;
  pass &= run_cli("train --config " + in_dir("train.ini") + " --out " + in_dir("b"),
                  "b") == 0;
  const bool csv_match =
      slurp(in_dir("a/metrics.csv")) == slurp(in_dir("b/metrics.csv"));
  const bool ckpt_match =
      slurp(in_dir("a/checkpoint.hyds")) == slurp(in_dir("b/checkpoint.hyds"));
  pass &= csv_match && ckpt_match;
  detail << "bitwise identical across reruns: csv " << (csv_match ? "yes" : "no")
         << ", checkpoint " << (ckpt_match ? "yes" : "no");

  // Dump round-trip bit-exactness.
  Rng rng(0xC9);
  EmbeddingDump dump;
  dump.rows = oracles::random_unit_rows(9, 6, rng);
  dump.flags = EmbeddingDump::kFlagUnitNorm;
  write_dump(in_dir("x.hyde"), dump);
  const EmbeddingDump loaded = read_dump(in_dir("x.hyde"));
  write_dump(in_dir("y.hyde"), loaded);
  const bool dump_match = slurp(in_dir("x.hyde")) == slurp(in_dir("y.hyde"));
  pass &= dump_match;
  detail << "; dump round-trip " << (dump_match ? "bit-exact" : "MISMATCH");

  // Checkpoint round-trip bit-exactness.
  const EncoderState state = load_checkpoint(in_dir("a/checkpoint.hyds"));
  save_checkpoint(in_dir("resaved.hyds"), state);
  const bool ckpt_rt =
      slurp(in_dir("a/checkpoint.hyds")) == slurp(in_dir("resaved.hyds"));
  pass &= ckpt_rt;
  detail << "; checkpoint round-trip " << (ckpt_rt ? "bit-exact" : "MISMATCH");

  // Malformed files produce the specified errors.
  int error_hits = 0;
  const std::string bytes = slurp(in_dir("x.hyde"));
  std::ofstream(in_dir("trunc.hyde"), std::ios::binary)
      << bytes.substr(0, bytes.size() - 2);
  try {
    read_dump(in_dir("trunc.hyde"));
  } catch (const Error& e) {
    error_hits += e.code() == ErrorCode::kTruncatedPayload;
  }
  std::string magic = bytes;
  magic[0] = 'Q';
  std::ofstream(in_dir("magic.hyde"), std::ios::binary) << magic;
  try {
    read_dump(in_dir("magic.hyde"));
  } catch (const Error& e) {
    error_hits += e.code() == ErrorCode::kBadMagic;
  }
  std::string version = bytes;
  version[4] = 42;
  std::ofstream(in_dir("version.hyde"), std::ios::binary) << version;
  try {
    read_dump(in_dir("version.hyde"));
  } catch (const Error& e) {
    error_hits += e.code() == ErrorCode::kVersionUnsupported;
  }
  pass &= error_hits == 3;
  detail << "; malformed-file errors " << error_hits << "/3";

  return report(9, pass, detail.str());
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      only = std::atoi(argv[i + 1]);
    }
  }

  bool (*criteria[])() = {criterion_gradient,
                          criterion_entropy_consistency,
                          criterion_cancellation_invariance,
                          criterion_normalizer,
                          criterion_collapse_dichotomy,
                          criterion_toy_ssl,
                          criterion_kappa_trend,
                          criterion_oracle_parity,
                          criterion_determinism_roundtrips};
  int failures = 0;
  for (int c = 1; c <= 9; ++c) {
    if (only != 0 && c != only) continue;
    try {
      if (!criteria[c - 1]()) ++failures;
    } catch (const std::exception& e) {
      report(c, false, std::string("exception: ") + e.what());
      ++failures;
    }
  }
  if (only == 0) {
    std::cout << (failures == 0 ? "all criteria passed"
                                : std::to_string(failures) + " criteria failed")
              << std::endl;
  }
  return failures;
}
