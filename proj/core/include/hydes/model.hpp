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

#include <functional>
#include <string>
#include <vector>

#include "hydes/datastore.hpp"
#include "hydes/objective.hpp"
#include "hydes/views.hpp"

namespace hydes {

enum class Activation { kRelu, kGelu };

Activation parse_activation(const std::string& name);
const char* to_string(Activation act);

struct EncoderConfig {
  int input_dim = 16;
  std::vector<int> hidden_dims = {64, 64};
  int projector_dim = 16;
  Activation activation = Activation::kRelu;
  uint64_t seed = 1;

  void validate() const;
  /// Layer widths including input and projector output.
  std::vector<int> layer_dims() const;
};

/// MLP encoder + projector parameters with paired AdamW moments.
/// Weights are Kaiming-uniform fan-in (bound sqrt(6 / fan_in)), biases zero,
/// drawn row-major layer by layer from Rng(derive_seed(seed, layer)).
struct EncoderState {
  EncoderConfig config;
  std::vector<Matrix> weights;  // per layer, [out x in]
  std::vector<Vector> biases;   // per layer
  std::vector<Matrix> m_weights, v_weights;
  std::vector<Vector> m_biases, v_biases;
  int64_t step_count = 0;

  static EncoderState init(const EncoderConfig& config);
};

struct TrainConfig {
  int batch_size = 128;  // sources per batch; each contributes all its views
  double learning_rate = 1e-3;
  double weight_decay = 0.01;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  int epochs = 50;
  double kappa = 2.0;
  double alpha = 1.0;
  double beta = 1.0;
  uint64_t seed = 1;

  void validate() const;
};

/// Forward pass results, kept for the backward pass.
struct ForwardCache {
  std::vector<Matrix> layer_inputs;     // a_0 .. a_{L-1}
  std::vector<Matrix> pre_activations;  // z_0 .. z_{L-1}
  Matrix pre_projection;                // == pre_activations.back()
  Vector pre_norms;
  Matrix embeddings;  // unit rows
};

struct ParamGradients {
  std::vector<Matrix> weights;
  std::vector<Vector> biases;
};

/// MLP forward followed by row-wise sphere projection.
ForwardCache forward(const EncoderState& state, const Matrix& inputs);

/// Exact reverse-mode gradients of the parameters given
/// d(loss)/d(pre_projection). Throws MissingForwardCache when the cache is
/// empty.
ParamGradients backward(const EncoderState& state, const ForwardCache& cache,
                        const Matrix& grad_pre_projection);

/// Decoupled-weight-decay Adam update with bias correction.
void adamw_step(EncoderState& state, const ParamGradients& grads,
                const TrainConfig& config);

struct EpochLog {
  int epoch = 0;
  LossBreakdown mean_loss;
  double probe_top1 = std::numeric_limits<double>::quiet_NaN();
  double probe_top5 = std::numeric_limits<double>::quiet_NaN();
};

/// Optional per-epoch hook; may fill the probe fields of the log entry.
using EpochCallback =
    std::function<void(int epoch, const EncoderState& state, EpochLog& log)>;

struct TrainResult {
  EncoderState state;
  std::vector<EpochLog> log;
};

/// Full training loop on vector data: per epoch, shuffles sources, draws
/// vMF view noise per sample, backpropagates the objective gradient through
/// the projection Jacobian, and steps AdamW. Throws NumericFailure on any
/// non-finite loss or parameter (checked every step).
TrainResult train(const VectorDataset& dataset, const ViewRecipe& recipe,
                  const TrainConfig& train_config,
                  const EncoderConfig& encoder_config,
                  const EpochCallback& callback = {});

/// Raster variant: multicrop views; local views are upsampled to
/// global_size so all views share the encoder input width.
TrainResult train(const RasterDataset& dataset, const ViewRecipe& recipe,
                  const TrainConfig& train_config,
                  const EncoderConfig& encoder_config,
                  const EpochCallback& callback = {});

/// Which representation feeds the probes: the unit embeddings (default)
/// or the raw projector output before the sphere projection.
enum class FeatureLayer { kEmbedding, kPreProjection };

/// Embeds vector samples (rows) with the trained encoder.
Matrix embed(const EncoderState& state, const Matrix& inputs,
             FeatureLayer layer = FeatureLayer::kEmbedding);
/// Embeds raster images after a deterministic resize to global_size.
Matrix embed(const EncoderState& state, const std::vector<RasterImage>& images,
             int view_size, FeatureLayer layer = FeatureLayer::kEmbedding);

enum class FreeInit { kConcentratedSpot, kUniformSphere };

/// Free-embedding training: the raw view vectors themselves are the
/// parameters (identity encoder). Isolates the loss dynamics from any
/// backbone; the collapse/expansion dichotomy is probed in this mode.
struct FreeEmbedConfig {
  int n_sources = 32;
  int views_per_source = 4;
  int dim = 16;
  FreeInit init = FreeInit::kConcentratedSpot;
  double init_sigma = 0.01;  // per-coordinate noise around the common spot
  double kappa = 10.0;
  double alpha = 1.0;
  double beta = 1.0;
  int steps = 600;
  double learning_rate = 3e-3;
  double weight_decay = 0.0;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  uint64_t seed = 1;
};

struct FreeEmbedResult {
  Matrix embeddings;  // unit rows after the last step
  std::vector<int64_t> source_id;
  std::vector<LossBreakdown> trajectory;
};

FreeEmbedResult train_free_embeddings(const FreeEmbedConfig& config);

/// Checkpoint file: magic "HYDS", version u32, config blob (u32 length +
/// UTF-8 text in the config format), then parameter tensors in declaration
/// order (per layer: weights then bias) as f64 with u32 rank/dims headers.
/// All multi-byte values little-endian.
void save_checkpoint(const std::string& path, const EncoderState& state);
EncoderState load_checkpoint(const std::string& path);

}  // namespace hydes
