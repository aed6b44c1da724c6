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

// Command-line driver: train, eval, geometry, align, sweep.
//
// Exit codes: 0 success, 2 config parse error, 3 numeric failure (NaN),
// 4 dimension / record-count mismatch, 5 class-name mismatch, 1 other error.

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <thread>

#include <CLI11.hpp>

#include "hydes/align.hpp"
#include "hydes/config.hpp"
#include "hydes/datastore.hpp"
#include "hydes/errors.hpp"
#include "hydes/geometry.hpp"
#include "hydes/model.hpp"
#include "hydes/probes.hpp"
#include "hydes/report.hpp"

namespace fs = std::filesystem;
using namespace hydes;

namespace {

constexpr const char* kToolVersion = "0.1.0";

struct Overrides {
  std::optional<uint64_t> seed;
  std::optional<double> kappa;
  std::optional<double> alpha;
  std::optional<double> beta;
  std::optional<int> dims;
  std::optional<std::string> probe;
  std::optional<int> k;
};

std::string fmt(double v) { return CsvWriter::format_real(v); }

ViewRecipe recipe_from_config(const Config& cfg) {
  ViewRecipe recipe;
  recipe.n_global = static_cast<int>(cfg.get_int("views.n_global", recipe.n_global));
  recipe.n_local = static_cast<int>(cfg.get_int("views.n_local", recipe.n_local));
  recipe.global_scale_lo = cfg.get_real("views.global_scale_lo", recipe.global_scale_lo);
  recipe.global_scale_hi = cfg.get_real("views.global_scale_hi", recipe.global_scale_hi);
  recipe.local_scale_lo = cfg.get_real("views.local_scale_lo", recipe.local_scale_lo);
  recipe.local_scale_hi = cfg.get_real("views.local_scale_hi", recipe.local_scale_hi);
  recipe.global_size = static_cast<int>(cfg.get_int("views.global_size", recipe.global_size));
  recipe.local_size = static_cast<int>(cfg.get_int("views.local_size", recipe.local_size));
  recipe.hflip_prob = cfg.get_real("views.hflip_prob", recipe.hflip_prob);
  recipe.jitter_strength = cfg.get_real("views.jitter_strength", recipe.jitter_strength);
  return recipe;
}

TrainConfig train_from_config(const Config& cfg, const Overrides& ov) {
  TrainConfig tc;
  tc.batch_size = static_cast<int>(cfg.get_int("train.batch_size", tc.batch_size));
  tc.learning_rate = cfg.get_real("train.learning_rate", tc.learning_rate);
  tc.weight_decay = cfg.get_real("train.weight_decay", tc.weight_decay);
  tc.adam_beta1 = cfg.get_real("train.adam_beta1", tc.adam_beta1);
  tc.adam_beta2 = cfg.get_real("train.adam_beta2", tc.adam_beta2);
  tc.adam_eps = cfg.get_real("train.adam_eps", tc.adam_eps);
  tc.epochs = static_cast<int>(cfg.get_int("train.epochs", tc.epochs));
  tc.kappa = cfg.get_real("train.kappa", tc.kappa);
  tc.alpha = cfg.get_real("train.alpha", tc.alpha);
  tc.beta = cfg.get_real("train.beta", tc.beta);
  tc.seed = cfg.get_u64("train.seed", tc.seed);
  if (ov.seed) tc.seed = *ov.seed;
  if (ov.kappa) tc.kappa = *ov.kappa;
  if (ov.alpha) tc.alpha = *ov.alpha;
  if (ov.beta) tc.beta = *ov.beta;
  return tc;
}

EncoderConfig encoder_from_config(const Config& cfg, int input_dim,
                                  const Overrides& ov) {
  EncoderConfig ec;
  ec.input_dim = input_dim;
  ec.hidden_dims = cfg.get_int_list("encoder.hidden_dims", ec.hidden_dims);
  ec.projector_dim = static_cast<int>(cfg.get_int("encoder.projector_dim", ec.projector_dim));
  ec.activation = parse_activation(cfg.get_string("encoder.activation", "relu"));
  ec.seed = cfg.get_u64("encoder.seed", ec.seed);
  if (ov.dims) ec.projector_dim = *ov.dims;
  return ec;
}

struct ProbeOptions {
  bool enabled = false;
  std::string kind = "linear";  // linear | knn | both
  int every = 1;
  double train_fraction = 0.8;
  uint64_t split_seed = 5;
  int k = 20;
};

ProbeOptions probe_from_config(const Config& cfg, const Overrides& ov) {
  ProbeOptions p;
  p.enabled = cfg.get_bool("probe.enabled", false);
  p.kind = cfg.get_string("probe.kind", p.kind);
  p.every = static_cast<int>(cfg.get_int("probe.every", p.every));
  p.train_fraction = cfg.get_real("probe.train_fraction", p.train_fraction);
  p.split_seed = cfg.get_u64("probe.split_seed", p.split_seed);
  p.k = static_cast<int>(cfg.get_int("probe.k", p.k));
  if (ov.probe) {
    p.kind = *ov.probe;
    p.enabled = true;
  }
  if (ov.k) p.k = *ov.k;
  if (p.kind != "linear" && p.kind != "knn" && p.kind != "both") {
    raise(ErrorCode::kConfigParse, "probe.kind must be linear | knn | both");
  }
  return p;
}

struct LoadedDataset {
  std::optional<VectorDataset> vectors;
  std::optional<RasterDataset> raster;
  std::vector<int64_t> labels;

  bool is_vector() const { return vectors.has_value(); }
  Eigen::Index size() const {
    return is_vector() ? vectors->size()
                       : static_cast<Eigen::Index>(raster->size());
  }
};

LoadedDataset load_dataset(const Config& cfg) {
  LoadedDataset out;
  const std::string kind = cfg.get_string("dataset.kind", "synthetic");
  if (kind == "synthetic") {
    SyntheticSpec spec;
    spec.n_classes = static_cast<int>(cfg.get_int("dataset.n_classes", spec.n_classes));
    spec.samples_per_class =
        static_cast<int>(cfg.get_int("dataset.samples_per_class", spec.samples_per_class));
    spec.dim = static_cast<int>(cfg.get_int("dataset.dim", spec.dim));
    spec.class_kappa = cfg.get_real("dataset.class_kappa", spec.class_kappa);
    spec.view_kappa = cfg.get_real("dataset.view_kappa", spec.view_kappa);
    spec.seed = cfg.get_u64("dataset.seed", spec.seed);
    out.vectors = generate_synthetic(spec);
    out.labels = out.vectors->labels;
  } else if (kind == "raster") {
    const std::string path = cfg.get_string("dataset.path");
    const int height = static_cast<int>(cfg.get_int("dataset.height", 32));
    const int width = static_cast<int>(cfg.get_int("dataset.width", 32));
    const int channels = static_cast<int>(cfg.get_int("dataset.channels", 3));
    out.raster = load_raster_dataset(path, height, width, channels);
    out.labels = out.raster->labels;
  } else {
    raise(ErrorCode::kConfigParse, "dataset.kind must be synthetic | raster");
  }
  return out;
}

Matrix embed_dataset(const EncoderState& state, const LoadedDataset& data,
                     const ViewRecipe& recipe,
                     FeatureLayer layer = FeatureLayer::kEmbedding) {
  if (data.is_vector()) return embed(state, data.vectors->samples, layer);
  return embed(state, data.raster->images, recipe.global_size, layer);
}

struct ProbeScores {
  double top1 = std::numeric_limits<double>::quiet_NaN();
  double top5 = std::numeric_limits<double>::quiet_NaN();
};

/// Embeds the dataset, splits it per class, and runs the configured probe;
/// "both" reports the linear numbers (the kNN pair lands in eval output).
ProbeScores run_probe(const EncoderState& state, const LoadedDataset& data,
                      const ViewRecipe& recipe, const ProbeOptions& opts) {
  const Matrix all = embed_dataset(state, data, recipe);
  std::vector<int> labels(data.labels.begin(), data.labels.end());
  const SplitIndices split =
      stratified_split(labels, opts.train_fraction, opts.split_seed);
  LabeledEmbeddings train_set, test_set;
  train_set.embeddings.resize(static_cast<Eigen::Index>(split.train.size()), all.cols());
  test_set.embeddings.resize(static_cast<Eigen::Index>(split.test.size()), all.cols());
  for (size_t i = 0; i < split.train.size(); ++i) {
    train_set.embeddings.row(static_cast<Eigen::Index>(i)) = all.row(split.train[i]);
    train_set.labels.push_back(labels[static_cast<size_t>(split.train[i])]);
  }
  for (size_t i = 0; i < split.test.size(); ++i) {
    test_set.embeddings.row(static_cast<Eigen::Index>(i)) = all.row(split.test[i]);
    test_set.labels.push_back(labels[static_cast<size_t>(split.test[i])]);
  }
  const ProbeResult result =
      opts.kind == "knn" ? knn_probe(train_set, test_set, opts.k)
                         : linear_probe(train_set, test_set);
  return {result.top1, result.top5};
}

void append_config_echo(ManifestWriter& mw, const Config& cfg) {
  mw.section("config");
  for (const auto& key : cfg.keys()) {
    mw.kv(key, cfg.get_string(key));
  }
}

void write_format_versions(ManifestWriter& mw) {
  mw.section("formats");
  mw.kv("tool_version", std::string(kToolVersion));
  mw.kv("checkpoint_version", static_cast<int64_t>(1));
  mw.kv("dump_version", static_cast<int64_t>(EmbeddingDump::kVersion));
  mw.kv("csv_schema_epoch_metrics", std::string("hydes.epoch_metrics.v1"));
  mw.kv("csv_schema_eval", std::string("hydes.eval.v1"));
  mw.kv("csv_schema_geometry", std::string("hydes.geometry.v1"));
  mw.kv("csv_schema_alignment", std::string("hydes.alignment.v1"));
  mw.kv("csv_schema_sweep", std::string("hydes.sweep.v1"));
}

void write_metric_definitions(ManifestWriter& mw) {
  mw.section("metric_definitions");
  mw.kv("anisotropy", std::string("top eigenvalue / trace of sample covariance"));
  mw.kv("feature_correlation", std::string("mean |off-diagonal Pearson| across coordinates"));
  mw.kv("center_vector_norm", std::string("L2 norm of the mean embedding"));
  mw.kv("effective_rank", std::string("exp(entropy of sigma_k / sum sigma); embedding rank on centered rows, centroid rank on normalized class centroids"));
  mw.kv("d_prime", std::string("(mu_within - mu_between) / sqrt((var_within + var_between) / 2) over cosine similarities"));
  mw.kv("angles", std::string("degrees, arccos of clamped cosine; all-pairs sampled up to 1e6, positives exhaustive"));
  mw.kv("sparsity", std::string("fraction of coordinates with |value| < tau / sqrt(D)"));
}

int run_train_cell(const Config& cfg, const Overrides& ov,
                   const std::string& out_dir, bool echo);

// ---------------------------------------------------------------- train --

int cmd_train(const std::string& config_path, const Overrides& ov,
              const std::string& out_dir) {
  const Config cfg = Config::parse_file(config_path);
  fs::create_directories(out_dir);
  return run_train_cell(cfg, ov, out_dir, true);
}

int run_train_cell(const Config& cfg, const Overrides& ov,
                   const std::string& out_dir, bool echo) {
  const std::string mode = cfg.get_string("train.mode", "encoder");
  const TrainConfig tc = train_from_config(cfg, ov);

  ManifestWriter mw;
  mw.section("run");
  mw.kv("command", std::string("train"));
  mw.kv("mode", mode);
  mw.kv("seed", tc.seed);
  write_format_versions(mw);
  append_config_echo(mw, cfg);

  if (mode == "free") {
    FreeEmbedConfig fc;
    fc.n_sources = static_cast<int>(cfg.get_int("free.n_sources", fc.n_sources));
    fc.views_per_source =
        static_cast<int>(cfg.get_int("free.views_per_source", fc.views_per_source));
    fc.dim = static_cast<int>(cfg.get_int("free.dim", fc.dim));
    const std::string init = cfg.get_string("free.init", "spot");
    if (init == "spot") {
      fc.init = FreeInit::kConcentratedSpot;
    } else if (init == "uniform") {
      fc.init = FreeInit::kUniformSphere;
    } else {
      raise(ErrorCode::kConfigParse, "free.init must be spot | uniform");
    }
    fc.init_sigma = cfg.get_real("free.init_sigma", fc.init_sigma);
    fc.steps = static_cast<int>(cfg.get_int("free.steps", fc.steps));
    fc.learning_rate = cfg.get_real("free.learning_rate", fc.learning_rate);
    fc.weight_decay = cfg.get_real("free.weight_decay", fc.weight_decay);
    fc.kappa = tc.kappa;
    fc.alpha = tc.alpha;
    fc.beta = tc.beta;
    fc.seed = tc.seed;

    const FreeEmbedResult result = train_free_embeddings(fc);
    CsvWriter csv("hydes.epoch_metrics.v1",
                  {"epoch", "h_global", "h_local", "mi_objective",
                   "training_loss", "probe_top1", "probe_top5"});
    for (size_t i = 0; i < result.trajectory.size(); ++i) {
      const LossBreakdown& l = result.trajectory[i];
      csv.row({std::to_string(i + 1), fmt(l.h_global), fmt(l.h_local),
               fmt(l.mi_objective), fmt(l.training_loss), "nan", "nan"});
    }
    csv.write(out_dir + "/metrics.csv");

    EmbeddingDump dump;
    dump.rows = result.embeddings;
    dump.flags = EmbeddingDump::kFlagUnitNorm;
    write_dump(out_dir + "/embeddings.hyde", dump);
    write_labels(out_dir + "/sources.txt", result.source_id);
    mw.write(out_dir + "/manifest.txt");
    if (echo) std::cout << "free-embedding run written to " << out_dir << "\n";
    return 0;
  }

  const LoadedDataset data = load_dataset(cfg);
  const ViewRecipe recipe = recipe_from_config(cfg);
  const ProbeOptions probe = probe_from_config(cfg, ov);
  const int input_dim =
      data.is_vector()
          ? static_cast<int>(data.vectors->samples.cols())
          : recipe.global_size * recipe.global_size *
                data.raster->images.front().channels;
  const EncoderConfig ec = encoder_from_config(cfg, input_dim, ov);

  const EpochCallback callback = [&](int epoch, const EncoderState& state,
                                     EpochLog& log) {
    if (!probe.enabled || probe.every < 1 || epoch % probe.every != 0) return;
    const ProbeScores scores = run_probe(state, data, recipe, probe);
    log.probe_top1 = scores.top1;
    log.probe_top5 = scores.top5;
  };

  const TrainResult result =
      data.is_vector() ? train(*data.vectors, recipe, tc, ec, callback)
                       : train(*data.raster, recipe, tc, ec, callback);

  save_checkpoint(out_dir + "/checkpoint.hyds", result.state);
  CsvWriter csv("hydes.epoch_metrics.v1",
                {"epoch", "h_global", "h_local", "mi_objective",
                 "training_loss", "probe_top1", "probe_top5"});
  for (const EpochLog& log : result.log) {
    csv.row({std::to_string(log.epoch), fmt(log.mean_loss.h_global),
             fmt(log.mean_loss.h_local), fmt(log.mean_loss.mi_objective),
             fmt(log.mean_loss.training_loss), fmt(log.probe_top1),
             fmt(log.probe_top5)});
  }
  csv.write(out_dir + "/metrics.csv");
  mw.write(out_dir + "/manifest.txt");
  if (echo) std::cout << "checkpoint and metrics written to " << out_dir << "\n";
  return 0;
}

// ----------------------------------------------------------------- eval --

int cmd_eval(const std::string& checkpoint_path, const std::string& config_path,
             const Overrides& ov, const std::string& out_dir,
             bool dump_embeddings, const std::string& features) {
  const Config cfg = Config::parse_file(config_path);
  const EncoderState state = load_checkpoint(checkpoint_path);
  const LoadedDataset data = load_dataset(cfg);
  const ViewRecipe recipe = recipe_from_config(cfg);
  ProbeOptions probe = probe_from_config(cfg, ov);
  if (!ov.probe && !probe.enabled) probe.kind = "both";
  FeatureLayer layer = FeatureLayer::kEmbedding;
  if (features == "pre_projection") {
    layer = FeatureLayer::kPreProjection;
  } else if (features != "embedding") {
    raise(ErrorCode::kConfigParse,
          "--features must be embedding | pre_projection");
  }

  const int dataset_dim =
      data.is_vector()
          ? static_cast<int>(data.vectors->samples.cols())
          : recipe.global_size * recipe.global_size *
                data.raster->images.front().channels;
  if (dataset_dim != state.config.input_dim) {
    raise(ErrorCode::kDimensionMismatch,
          "checkpoint input_dim " + std::to_string(state.config.input_dim) +
              " != dataset width " + std::to_string(dataset_dim));
  }

  fs::create_directories(out_dir);
  const Matrix all = embed_dataset(state, data, recipe, layer);
  std::vector<int> labels(data.labels.begin(), data.labels.end());
  const SplitIndices split =
      stratified_split(labels, probe.train_fraction, probe.split_seed);
  LabeledEmbeddings train_set, test_set;
  train_set.embeddings.resize(static_cast<Eigen::Index>(split.train.size()), all.cols());
  test_set.embeddings.resize(static_cast<Eigen::Index>(split.test.size()), all.cols());
  for (size_t i = 0; i < split.train.size(); ++i) {
    train_set.embeddings.row(static_cast<Eigen::Index>(i)) = all.row(split.train[i]);
    train_set.labels.push_back(labels[static_cast<size_t>(split.train[i])]);
  }
  for (size_t i = 0; i < split.test.size(); ++i) {
    test_set.embeddings.row(static_cast<Eigen::Index>(i)) = all.row(split.test[i]);
    test_set.labels.push_back(labels[static_cast<size_t>(split.test[i])]);
  }

  CsvWriter csv("hydes.eval.v1", {"method", "dataset", "split", "metric", "value"});
  const std::string dataset_name = cfg.get_string("dataset.kind", "synthetic");
  if (probe.kind == "linear" || probe.kind == "both") {
    const ProbeResult r = linear_probe(train_set, test_set);
    csv.row({"linear", dataset_name, "test", "top1", fmt(r.top1)});
    csv.row({"linear", dataset_name, "test", "top5", fmt(r.top5)});
  }
  if (probe.kind == "knn" || probe.kind == "both") {
    const ProbeResult r = knn_probe(train_set, test_set, probe.k);
    csv.row({"knn", dataset_name, "test", "top1", fmt(r.top1)});
    csv.row({"knn", dataset_name, "test", "top5", fmt(r.top5)});
  }
  csv.write(out_dir + "/metrics.csv");

  if (dump_embeddings) {
    EmbeddingDump dump;
    dump.rows = all;
    dump.flags = layer == FeatureLayer::kEmbedding ? EmbeddingDump::kFlagUnitNorm
                                                   : 0u;
    write_dump(out_dir + "/embeddings.hyde", dump);
    write_labels(out_dir + "/labels.txt", data.labels);
  }

  ManifestWriter mw;
  mw.section("run");
  mw.kv("command", std::string("eval"));
  mw.kv("checkpoint", checkpoint_path);
  mw.kv("features", features);
  mw.kv("probe_kind", probe.kind);
  mw.kv("knn_k", static_cast<int64_t>(probe.k));
  mw.kv("train_fraction", probe.train_fraction);
  mw.kv("split_seed", probe.split_seed);
  write_format_versions(mw);
  append_config_echo(mw, cfg);
  mw.write(out_dir + "/manifest.txt");
  std::cout << "eval metrics written to " << out_dir << "\n";
  return 0;
}

// ------------------------------------------------------------- geometry --

int cmd_geometry(const std::string& dump_path, const std::string& labels_path,
                 const std::string& sources_path, const std::string& out_dir) {
  const EmbeddingDump dump = read_dump(dump_path);
  std::optional<std::vector<int64_t>> labels;
  std::optional<std::vector<int64_t>> sources;
  if (!labels_path.empty()) {
    labels = read_labels(labels_path);
    if (static_cast<Eigen::Index>(labels->size()) != dump.rows.rows()) {
      raise(ErrorCode::kShapeMismatch,
            "labels count " + std::to_string(labels->size()) + " != dump rows " +
                std::to_string(dump.rows.rows()));
    }
  }
  if (!sources_path.empty()) {
    sources = read_labels(sources_path);
    if (static_cast<Eigen::Index>(sources->size()) != dump.rows.rows()) {
      raise(ErrorCode::kShapeMismatch, "source-id count != dump rows");
    }
  }

  fs::create_directories(out_dir);
  const GeometryReport report = geometry_report(dump.rows, labels, sources);
  CsvWriter csv("hydes.geometry.v1", {"metric", "value"});
  csv.row({"anisotropy", fmt(report.anisotropy)});
  csv.row({"feature_correlation", fmt(report.feature_correlation)});
  csv.row({"center_vector_norm", fmt(report.center_vector_norm)});
  csv.row({"centroid_rank", fmt(report.centroid_rank)});
  csv.row({"embedding_rank", fmt(report.embedding_rank)});
  csv.row({"d_prime", fmt(report.d_prime)});
  csv.row({"all_pairs_angle_mean_deg", fmt(report.all_pairs.mean_deg)});
  csv.row({"all_pairs_angle_std_deg", fmt(report.all_pairs.std_deg)});
  csv.row({"positive_pairs_angle_mean_deg", fmt(report.positive_pairs.mean_deg)});
  csv.row({"positive_pairs_angle_std_deg", fmt(report.positive_pairs.std_deg)});
  csv.row({"sparsity", fmt(report.sparsity)});
  csv.write(out_dir + "/geometry.csv");

  if (labels) {
    const Matrix sim = centroid_similarity_matrix(dump.rows, *labels);
    std::vector<std::string> names;
    names.reserve(static_cast<size_t>(sim.rows()));
    for (Eigen::Index i = 0; i < sim.rows(); ++i) {
      names.push_back("class " + std::to_string(i));
    }
    write_heatmap_svg(out_dir + "/centroid_heatmap.svg", sim, names,
                      "Centroid cosine similarity");
  }

  ManifestWriter mw;
  mw.section("run");
  mw.kv("command", std::string("geometry"));
  mw.kv("dump", dump_path);
  write_format_versions(mw);
  write_metric_definitions(mw);
  mw.section("geometry_report");
  mw.kv("anisotropy", report.anisotropy);
  mw.kv("feature_correlation", report.feature_correlation);
  mw.kv("center_vector_norm", report.center_vector_norm);
  mw.kv("centroid_rank", report.centroid_rank);
  mw.kv("embedding_rank", report.embedding_rank);
  mw.kv("d_prime", report.d_prime);
  mw.kv("all_pairs_angle_mean_deg", report.all_pairs.mean_deg);
  mw.kv("all_pairs_angle_std_deg", report.all_pairs.std_deg);
  mw.kv("positive_pairs_angle_mean_deg", report.positive_pairs.mean_deg);
  mw.kv("positive_pairs_angle_std_deg", report.positive_pairs.std_deg);
  mw.kv("sparsity", report.sparsity);
  mw.write(out_dir + "/manifest.txt");
  std::cout << "geometry report written to " << out_dir << "\n";
  return 0;
}

// ---------------------------------------------------------------- align --

int cmd_align(const std::string& dump_path, const std::string& labels_path,
              const std::string& names_path,
              const std::vector<std::string>& externals, bool with_pearson,
              const std::string& out_dir) {
  const EmbeddingDump dump = read_dump(dump_path);
  const std::vector<int64_t> labels = read_labels(labels_path);
  if (static_cast<Eigen::Index>(labels.size()) != dump.rows.rows()) {
    raise(ErrorCode::kShapeMismatch, "labels count != dump rows");
  }

  const Matrix centroids = class_centroids(dump.rows, labels);
  std::vector<std::string> class_names;
  if (!names_path.empty()) {
    std::ifstream in(names_path);
    if (!in) raise(ErrorCode::kIoError, "cannot open '" + names_path + "'");
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty()) class_names.push_back(line);
    }
  } else {
    for (Eigen::Index i = 0; i < centroids.rows(); ++i) {
      class_names.push_back(std::to_string(i));
    }
  }
  if (static_cast<Eigen::Index>(class_names.size()) != centroids.rows()) {
    raise(ErrorCode::kClassNameMismatch,
          "name count " + std::to_string(class_names.size()) +
              " != class count " + std::to_string(centroids.rows()));
  }

  // Learned centroid distances feed the dendrogram once, shared across
  // external references.
  Matrix learned_dist =
      (1.0 - cosine_similarity_matrix(centroids, centroids).array()).matrix();
  for (Eigen::Index i = 0; i < learned_dist.rows(); ++i) learned_dist(i, i) = 0.0;
  learned_dist = 0.5 * (learned_dist + learned_dist.transpose());
  const Dendrogram dendro = average_linkage(learned_dist);

  fs::create_directories(out_dir);
  std::vector<std::string> columns = {"external", "spearman", "cophenetic"};
  if (with_pearson) columns.push_back("cophenetic_pearson");
  CsvWriter csv("hydes.alignment.v1", columns);
  for (const std::string& entry : externals) {
    const size_t eq = entry.find('=');
    if (eq == std::string::npos) {
      raise(ErrorCode::kConfigParse,
            "--external expects KIND=PATH, got '" + entry + "'");
    }
    const SimilarityKind kind = parse_similarity_kind(entry.substr(0, eq));
    const ExternalSimilarity external =
        read_external_similarity_csv(entry.substr(eq + 1), kind);
    const double rho = alignment_correlation(centroids, class_names, external);

    // Reorder the external distances into centroid class order for the
    // cophenetic comparison.
    std::map<std::string, Eigen::Index> index;
    for (size_t i = 0; i < external.class_names.size(); ++i) {
      index[external.class_names[i]] = static_cast<Eigen::Index>(i);
    }
    const Matrix ext_dist = external.to_distance();
    Matrix ordered(centroids.rows(), centroids.rows());
    for (Eigen::Index i = 0; i < centroids.rows(); ++i) {
      for (Eigen::Index j = 0; j < centroids.rows(); ++j) {
        ordered(i, j) = ext_dist(index.at(class_names[static_cast<size_t>(i)]),
                                 index.at(class_names[static_cast<size_t>(j)]));
      }
    }
    const double coph = cophenetic_correlation(dendro, ordered);
    std::vector<std::string> row = {to_string(external.kind), fmt(rho), fmt(coph)};
    if (with_pearson) {
      row.push_back(fmt(cophenetic_correlation_pearson(dendro, ordered)));
    }
    csv.row(row);
  }
  csv.write(out_dir + "/alignment.csv");

  ManifestWriter mw;
  mw.section("run");
  mw.kv("command", std::string("align"));
  mw.kv("dump", dump_path);
  mw.kv("distance_transform", std::string("centroids: 1 - cosine; similarities: max - value"));
  write_format_versions(mw);
  mw.write(out_dir + "/manifest.txt");
  std::cout << "alignment report written to " << out_dir << "\n";
  return 0;
}

// ---------------------------------------------------------------- sweep --

int worker_count() {
  const char* env = std::getenv("HYDES_THREADS");
  if (!env) return 1;
  const int n = std::atoi(env);
  return n > 0 ? n : 1;
}

int cmd_sweep(const std::string& config_path, const std::string& parameter,
              const std::vector<std::string>& values, const Overrides& ov,
              const std::string& out_dir) {
  if (parameter != "kappa" && parameter != "beta" && parameter != "projector_dim") {
    raise(ErrorCode::kConfigParse,
          "sweep parameter must be kappa | beta | projector_dim");
  }
  if (values.empty()) raise(ErrorCode::kConfigParse, "sweep needs at least one value");
  const Config base = Config::parse_file(config_path);
  fs::create_directories(out_dir);

  struct Cell {
    std::string value;
    std::string dir;
    int exit_code = 0;
    bool skipped = false;
  };
  std::vector<Cell> cells;
  for (const std::string& value : values) {
    cells.push_back({value, out_dir + "/" + parameter + "=" + value, 0, false});
  }

  std::atomic<size_t> next{0};
  auto run_cells = [&]() {
    for (;;) {
      const size_t idx = next.fetch_add(1);
      if (idx >= cells.size()) return;
      Cell& cell = cells[idx];
      const std::string marker = cell.dir + "/_complete";
      if (fs::exists(marker)) {
        cell.skipped = true;
        continue;
      }
      fs::create_directories(cell.dir);
      try {
        Config cfg = base;
        if (parameter == "kappa") {
          cfg.set("train.kappa", cell.value);
        } else if (parameter == "beta") {
          cfg.set("train.beta", cell.value);
        } else {
          cfg.set("encoder.projector_dim", cell.value);
        }
        run_train_cell(cfg, ov, cell.dir, false);
        std::ofstream(marker) << "ok\n";
      } catch (const Error& e) {
        std::ofstream(cell.dir + "/_failed") << e.what() << "\n";
        cell.exit_code = 1;
      }
    }
  };

  const int workers = std::min<int>(worker_count(), static_cast<int>(cells.size()));
  if (workers <= 1) {
    run_cells();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(run_cells);
    for (auto& t : pool) t.join();
  }

  // Aggregate per-epoch probe accuracy across cells.
  CsvWriter csv("hydes.sweep.v1",
                {"parameter", "value", "epoch", "probe_top1", "probe_top5"});
  std::vector<PlotSeries> series;
  for (const Cell& cell : cells) {
    const std::string metrics_path = cell.dir + "/metrics.csv";
    if (!fs::exists(metrics_path)) continue;
    try {
      const CsvTable table = CsvTable::read(metrics_path);
      const int epoch_col = table.column_index("epoch");
      const int top1_col = table.column_index("probe_top1");
      const int top5_col = table.column_index("probe_top5");
      PlotSeries line;
      line.name = parameter + "=" + cell.value;
      for (const auto& row : table.rows) {
        csv.row({parameter, cell.value, row[static_cast<size_t>(epoch_col)],
                 row[static_cast<size_t>(top1_col)], row[static_cast<size_t>(top5_col)]});
        const double top1 = std::strtod(row[static_cast<size_t>(top1_col)].c_str(), nullptr);
        if (std::isfinite(top1)) {
          line.x.push_back(std::strtod(row[static_cast<size_t>(epoch_col)].c_str(), nullptr));
          line.y.push_back(top1);
        }
      }
      if (!line.x.empty()) series.push_back(std::move(line));
    } catch (const Error& e) {
      std::cerr << "skipping unreadable cell metrics " << metrics_path << ": "
                << e.what() << "\n";
    }
  }
  csv.write(out_dir + "/sweep.csv");
  write_line_plot_svg(out_dir + "/sweep.svg", series, "epoch", "probe top-1",
                      "Sweep over " + parameter);

  ManifestWriter mw;
  mw.section("run");
  mw.kv("command", std::string("sweep"));
  mw.kv("parameter", parameter);
  std::string joined;
  for (size_t i = 0; i < values.size(); ++i) {
    if (i) joined += ",";
    joined += values[i];
  }
  mw.kv("values", joined);
  mw.kv("workers", static_cast<int64_t>(workers));
  write_format_versions(mw);
  mw.write(out_dir + "/manifest.txt");

  for (const Cell& cell : cells) {
    if (cell.exit_code != 0) {
      std::cerr << "sweep cell " << cell.dir << " failed (marker written)\n";
      return 1;
    }
  }
  std::cout << "sweep results written to " << out_dir << "\n";
  return 0;
}

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::kConfigParse:
      return 2;
    case ErrorCode::kNumericFailure:
      return 3;
    case ErrorCode::kDimensionMismatch:
    case ErrorCode::kShapeMismatch:
    case ErrorCode::kMalformedRecordSize:
      return 4;
    case ErrorCode::kClassNameMismatch:
      return 5;
    default:
      return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"HyDeS: hyperspherical density shaping at desk scale"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "runs/out";
  std::string checkpoint_path, dump_path, labels_path, sources_path, names_path;
  std::string parameter;
  std::string features = "embedding";
  std::vector<std::string> externals, sweep_values;
  bool dump_embeddings = false, with_pearson = false;
  Overrides ov;

  uint64_t seed_flag = 0;
  double kappa_flag = 0, alpha_flag = 0, beta_flag = 0;
  int dims_flag = 0, k_flag = 0;
  std::string probe_flag;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--out", out_dir, "output directory");
    auto* seed_opt = cmd->add_option("--seed", seed_flag, "override train seed");
    auto* kappa_opt = cmd->add_option("--kappa", kappa_flag, "override kernel concentration");
    auto* alpha_opt = cmd->add_option("--alpha", alpha_flag, "override global-entropy weight");
    auto* beta_opt = cmd->add_option("--beta", beta_flag, "override local-entropy weight");
    auto* dims_opt = cmd->add_option("--dims", dims_flag, "override projector dimension");
    auto* probe_opt = cmd->add_option("--probe", probe_flag, "probe kind: linear | knn | both");
    auto* k_opt = cmd->add_option("--k", k_flag, "kNN neighbor count");
    cmd->callback([&, seed_opt, kappa_opt, alpha_opt, beta_opt, dims_opt, probe_opt, k_opt]() {
      if (seed_opt->count()) ov.seed = seed_flag;
      if (kappa_opt->count()) ov.kappa = kappa_flag;
      if (alpha_opt->count()) ov.alpha = alpha_flag;
      if (beta_opt->count()) ov.beta = beta_flag;
      if (dims_opt->count()) ov.dims = dims_flag;
      if (probe_opt->count()) ov.probe = probe_flag;
      if (k_opt->count()) ov.k = k_flag;
    });
  };

  CLI::App* train_cmd = app.add_subcommand("train", "train an encoder (or free embeddings)");
  train_cmd->add_option("--config", config_path, "config file")->required();
  add_common(train_cmd);

  CLI::App* eval_cmd = app.add_subcommand("eval", "probe a checkpoint on a dataset");
  eval_cmd->add_option("--checkpoint", checkpoint_path, "checkpoint path")->required();
  eval_cmd->add_option("--config", config_path, "config file with the dataset")->required();
  eval_cmd->add_flag("--dump", dump_embeddings, "also write the embedding dump");
  eval_cmd->add_option("--features", features,
                       "probe layer: embedding | pre_projection");
  add_common(eval_cmd);

  CLI::App* geom_cmd = app.add_subcommand("geometry", "latent-geometry report for a dump");
  geom_cmd->add_option("--dump", dump_path, "embedding dump")->required();
  geom_cmd->add_option("--labels", labels_path, "labels sidecar");
  geom_cmd->add_option("--sources", sources_path, "source-id sidecar");
  geom_cmd->add_option("--out", out_dir, "output directory");

  CLI::App* align_cmd = app.add_subcommand("align", "semantic alignment against external matrices");
  align_cmd->add_option("--dump", dump_path, "embedding dump")->required();
  align_cmd->add_option("--labels", labels_path, "labels sidecar")->required();
  align_cmd->add_option("--names", names_path, "class-name file (one per line)");
  align_cmd->add_option("--external", externals, "external matrix as KIND=PATH (wup | lch | minilm)")
      ->required();
  align_cmd->add_flag("--pearson", with_pearson, "also report Pearson cophenetic correlation");
  align_cmd->add_option("--out", out_dir, "output directory");

  CLI::App* sweep_cmd = app.add_subcommand("sweep", "grid over kappa | beta | projector_dim");
  sweep_cmd->add_option("--config", config_path, "base config file")->required();
  sweep_cmd->add_option("--parameter", parameter, "kappa | beta | projector_dim")->required();
  sweep_cmd->add_option("--values", sweep_values, "comma-separated grid")
      ->required()
      ->delimiter(',');
  add_common(sweep_cmd);

  CLI11_PARSE(app, argc, argv);

  try {
    if (train_cmd->parsed()) return cmd_train(config_path, ov, out_dir);
    if (eval_cmd->parsed()) {
      return cmd_eval(checkpoint_path, config_path, ov, out_dir, dump_embeddings,
                      features);
    }
    if (geom_cmd->parsed()) {
      return cmd_geometry(dump_path, labels_path, sources_path, out_dir);
    }
    if (align_cmd->parsed()) {
      return cmd_align(dump_path, labels_path, names_path, externals,
                       with_pearson, out_dir);
    }
    if (sweep_cmd->parsed()) {
      return cmd_sweep(config_path, parameter, sweep_values, ov, out_dir);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
