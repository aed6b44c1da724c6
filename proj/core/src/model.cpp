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

#include "hydes/model.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <sstream>

#include "hydes/config.hpp"
#include "hydes/errors.hpp"

namespace hydes {

namespace {

constexpr char kCheckpointMagic[4] = {'H', 'Y', 'D', 'S'};
constexpr uint32_t kCheckpointVersion = 1;

double activation_value(Activation act, double z) {
  switch (act) {
    case Activation::kRelu:
      return z > 0.0 ? z : 0.0;
    case Activation::kGelu:
      return 0.5 * z * (1.0 + std::erf(z * M_SQRT1_2));
  }
  return z;
}

double activation_derivative(Activation act, double z) {
  switch (act) {
    case Activation::kRelu:
      return z > 0.0 ? 1.0 : 0.0;
    case Activation::kGelu: {
      const double cdf = 0.5 * (1.0 + std::erf(z * M_SQRT1_2));
      const double pdf = std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
      return cdf + z * pdf;
    }
  }
  return 1.0;
}

void check_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) {
    raise(ErrorCode::kNumericFailure, std::string(what) + " contains NaN/Inf");
  }
}

void check_finite(double v, const char* what) {
  if (!std::isfinite(v)) {
    raise(ErrorCode::kNumericFailure, std::string(what) + " is NaN/Inf");
  }
}

void check_state_finite(const EncoderState& state) {
  for (const auto& w : state.weights) check_finite(w, "weights");
  for (const auto& b : state.biases) {
    if (!b.allFinite()) raise(ErrorCode::kNumericFailure, "biases contain NaN/Inf");
  }
}

void adamw_update(Matrix& p, Matrix& m, Matrix& v, const Matrix& g,
                  const TrainConfig& c, double bc1, double bc2) {
  m = c.adam_beta1 * m + (1.0 - c.adam_beta1) * g;
  v = c.adam_beta2 * v + (1.0 - c.adam_beta2) * g.cwiseProduct(g);
  p -= c.learning_rate * c.weight_decay * p;
  p -= (c.learning_rate * (m / bc1).array() /
        ((v / bc2).array().sqrt() + c.adam_eps))
           .matrix();
}

void adamw_update(Vector& p, Vector& m, Vector& v, const Vector& g,
                  const TrainConfig& c, double bc1, double bc2) {
  m = c.adam_beta1 * m + (1.0 - c.adam_beta1) * g;
  v = c.adam_beta2 * v + (1.0 - c.adam_beta2) * g.cwiseProduct(g);
  p -= c.learning_rate * c.weight_decay * p;
  p -= (c.learning_rate * (m / bc1).array() /
        ((v / bc2).array().sqrt() + c.adam_eps))
           .matrix();
}

/// View seeds come from (run_seed, epoch, sample), so a sample's views do
/// not depend on batch composition or visit order.
uint64_t view_seed(uint64_t run_seed, int epoch, int64_t sample_index) {
  return derive_seed(run_seed, (static_cast<uint64_t>(epoch) << 32) ^
                                   static_cast<uint64_t>(sample_index));
}

struct AssembledBatch {
  Matrix inputs;
  std::vector<int64_t> source_id;
  std::vector<ViewKind> view_kind;
};

AssembledBatch assemble_vector_batch(const VectorDataset& dataset,
                                     const std::vector<int64_t>& sources,
                                     const ViewRecipe& recipe, uint64_t seed,
                                     int epoch) {
  const int views_per_source = recipe.total_views();
  const Eigen::Index rows =
      static_cast<Eigen::Index>(sources.size()) * views_per_source;
  AssembledBatch batch;
  batch.inputs.resize(rows, dataset.samples.cols());
  batch.source_id.reserve(static_cast<size_t>(rows));
  batch.view_kind.reserve(static_cast<size_t>(rows));
  Eigen::Index row = 0;
  for (const int64_t s : sources) {
    Rng rng(view_seed(seed, epoch, s));
    const auto views = synthetic_views(dataset.samples.row(s).transpose(),
                                       views_per_source, dataset.view_kappa, rng);
    for (int v = 0; v < views_per_source; ++v) {
      batch.inputs.row(row++) = views[static_cast<size_t>(v)].transpose();
      batch.source_id.push_back(s);
      batch.view_kind.push_back(v < recipe.n_global ? ViewKind::kGlobal
                                                    : ViewKind::kLocal);
    }
  }
  return batch;
}

AssembledBatch assemble_raster_batch(const RasterDataset& dataset,
                                     const std::vector<int64_t>& sources,
                                     const ViewRecipe& recipe, uint64_t seed,
                                     int epoch) {
  const int views_per_source = recipe.total_views();
  const int input_dim = recipe.global_size * recipe.global_size *
                        dataset.images.front().channels;
  AssembledBatch batch;
  batch.inputs.resize(static_cast<Eigen::Index>(sources.size()) * views_per_source,
                      input_dim);
  Eigen::Index row = 0;
  for (const int64_t s : sources) {
    Rng rng(view_seed(seed, epoch, s));
    auto views = multicrop(dataset.images[static_cast<size_t>(s)], recipe, rng);
    for (auto& view : views) {
      // The MLP has one input width; local crops are upsampled to it.
      if (view.image.height != recipe.global_size ||
          view.image.width != recipe.global_size) {
        view.image =
            bilinear_resize(view.image, recipe.global_size, recipe.global_size);
      }
      batch.inputs.row(row++) = view.image.flatten().transpose();
      batch.source_id.push_back(s);
      batch.view_kind.push_back(view.kind);
    }
  }
  return batch;
}

template <typename Assembler>
TrainResult train_impl(Eigen::Index n_samples, const ViewRecipe& recipe,
                       const TrainConfig& tc, const EncoderConfig& ec,
                       const EpochCallback& callback, Assembler&& assemble) {
  tc.validate();
  recipe.validate();
  if (n_samples < 1) raise(ErrorCode::kEmptyInput, "dataset is empty");

  TrainResult result;
  result.state = EncoderState::init(ec);
  const KernelParams params = KernelParams::create(tc.kappa, ec.projector_dim);
  const LossWeights weights{tc.alpha, tc.beta};

  std::vector<int64_t> order(static_cast<size_t>(n_samples));
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 1; epoch <= tc.epochs; ++epoch) {
    Rng shuffle_rng(derive_seed(tc.seed, 0x1000000ULL + static_cast<uint64_t>(epoch)));
    shuffle_rng.shuffle(order);

    LossBreakdown sum{};
    int steps = 0;
    for (size_t start = 0; start < order.size();
         start += static_cast<size_t>(tc.batch_size)) {
      const size_t stop =
          std::min(order.size(), start + static_cast<size_t>(tc.batch_size));
      std::vector<int64_t> sources(order.begin() + static_cast<long>(start),
                                   order.begin() + static_cast<long>(stop));
      if (sources.size() * static_cast<size_t>(recipe.total_views()) < 2) continue;

      AssembledBatch assembled = assemble(sources, epoch);
      ForwardCache cache = forward(result.state, assembled.inputs);

      EmbeddingBatch batch;
      batch.rows = cache.embeddings;
      batch.source_id = std::move(assembled.source_id);
      batch.view_kind = std::move(assembled.view_kind);

      const LossBreakdown loss = mi_objective(batch, params, weights);
      check_finite(loss.training_loss, "training loss");
      const Matrix grad_z = mi_gradient(batch, params, weights);
      const Matrix grad_pre =
          pre_projection_gradient(grad_z, cache.embeddings, cache.pre_norms);
      const ParamGradients grads = backward(result.state, cache, grad_pre);
      adamw_step(result.state, grads, tc);
      check_state_finite(result.state);

      sum.h_global += loss.h_global;
      sum.h_local += loss.h_local;
      sum.mi_objective += loss.mi_objective;
      sum.training_loss += loss.training_loss;
      ++steps;
    }

    EpochLog log;
    log.epoch = epoch;
    if (steps > 0) {
      log.mean_loss = {sum.h_global / steps, sum.h_local / steps,
                       sum.mi_objective / steps, sum.training_loss / steps};
    }
    if (callback) callback(epoch, result.state, log);
    result.log.push_back(log);
  }
  return result;
}

void put_u32(std::string& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_f64(std::string& out, double v) {
  uint64_t bits;
  std::memcpy(&bits, &v, sizeof(bits));
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
}

class ByteReader {
 public:
  ByteReader(std::string bytes, std::string path)
      : bytes_(std::move(bytes)), path_(std::move(path)) {}

  uint32_t u32() {
    need(4);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      v |= static_cast<uint32_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += 4;
    return v;
  }

  double f64() {
    need(8);
    uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) {
      bits |= static_cast<uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += 8;
    double v;
    std::memcpy(&v, &bits, sizeof(v));
    return v;
  }

  std::string text(size_t len) {
    need(len);
    std::string out = bytes_.substr(pos_, len);
    pos_ += len;
    return out;
  }

  void expect_magic(const char* magic) {
    need(4);
    if (std::memcmp(bytes_.data() + pos_, magic, 4) != 0) {
      raise(ErrorCode::kBadMagic, path_ + ": expected magic \"" + magic + "\"");
    }
    pos_ += 4;
  }

  void expect_end() const {
    if (pos_ != bytes_.size()) {
      raise(ErrorCode::kTruncatedPayload,
            path_ + ": " + std::to_string(bytes_.size() - pos_) + " trailing bytes");
    }
  }

 private:
  void need(size_t n) const {
    if (pos_ + n > bytes_.size()) {
      raise(ErrorCode::kTruncatedPayload, path_ + ": unexpected end of file");
    }
  }

  std::string bytes_;
  std::string path_;
  size_t pos_ = 0;
};

}  // namespace

Activation parse_activation(const std::string& name) {
  if (name == "relu") return Activation::kRelu;
  if (name == "gelu") return Activation::kGelu;
  raise(ErrorCode::kInvalidParam, "unknown activation '" + name + "'");
}

const char* to_string(Activation act) {
  return act == Activation::kRelu ? "relu" : "gelu";
}

void EncoderConfig::validate() const {
  if (input_dim < 1 || projector_dim < 1) {
    raise(ErrorCode::kInvalidParam, "encoder dims must be >= 1");
  }
  for (int h : hidden_dims) {
    if (h < 1) raise(ErrorCode::kInvalidParam, "hidden dims must be >= 1");
  }
}

std::vector<int> EncoderConfig::layer_dims() const {
  std::vector<int> dims;
  dims.push_back(input_dim);
  dims.insert(dims.end(), hidden_dims.begin(), hidden_dims.end());
  dims.push_back(projector_dim);
  return dims;
}

EncoderState EncoderState::init(const EncoderConfig& config) {
  config.validate();
  EncoderState state;
  state.config = config;
  const std::vector<int> dims = config.layer_dims();
  for (size_t layer = 0; layer + 1 < dims.size(); ++layer) {
    const int fan_in = dims[layer];
    const int fan_out = dims[layer + 1];
    const double bound = std::sqrt(6.0 / static_cast<double>(fan_in));
    Rng rng(derive_seed(config.seed, layer));
    Matrix w(fan_out, fan_in);
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) {
        w(r, c) = rng.uniform(-bound, bound);
      }
    }
    state.weights.push_back(std::move(w));
    state.biases.push_back(Vector::Zero(fan_out));
    state.m_weights.push_back(Matrix::Zero(fan_out, fan_in));
    state.v_weights.push_back(Matrix::Zero(fan_out, fan_in));
    state.m_biases.push_back(Vector::Zero(fan_out));
    state.v_biases.push_back(Vector::Zero(fan_out));
  }
  return state;
}

void TrainConfig::validate() const {
  if (learning_rate <= 0.0) raise(ErrorCode::kInvalidParam, "learning_rate must be > 0");
  if (batch_size < 2) raise(ErrorCode::kInvalidParam, "batch_size must be >= 2");
  if (epochs < 0) raise(ErrorCode::kInvalidParam, "epochs must be >= 0");
  if (kappa < 0.0 || alpha < 0.0 || beta < 0.0) {
    raise(ErrorCode::kInvalidParam, "kappa/alpha/beta must be >= 0");
  }
}

ForwardCache forward(const EncoderState& state, const Matrix& inputs) {
  if (inputs.cols() != state.config.input_dim) {
    raise(ErrorCode::kDimensionMismatch,
          "input width " + std::to_string(inputs.cols()) + " != input_dim " +
              std::to_string(state.config.input_dim));
  }
  ForwardCache cache;
  const size_t layers = state.weights.size();
  Matrix a = inputs;
  for (size_t l = 0; l < layers; ++l) {
    cache.layer_inputs.push_back(a);
    Matrix z = a * state.weights[l].transpose();
    z.rowwise() += state.biases[l].transpose();
    cache.pre_activations.push_back(z);
    if (l + 1 < layers) {
      a = z.unaryExpr([&](double v) {
        return activation_value(state.config.activation, v);
      });
    } else {
      a = z;
    }
  }
  cache.pre_projection = a;
  cache.pre_norms.resize(a.rows());
  cache.embeddings.resize(a.rows(), a.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    const Vector unit = project_to_sphere(a.row(i).transpose());
    cache.pre_norms[i] = a.row(i).norm();
    cache.embeddings.row(i) = unit.transpose();
  }
  return cache;
}

ParamGradients backward(const EncoderState& state, const ForwardCache& cache,
                        const Matrix& grad_pre_projection) {
  if (cache.layer_inputs.empty()) {
    raise(ErrorCode::kMissingForwardCache, "backward called without a forward cache");
  }
  const size_t layers = state.weights.size();
  if (grad_pre_projection.rows() != cache.pre_projection.rows() ||
      grad_pre_projection.cols() != cache.pre_projection.cols()) {
    raise(ErrorCode::kShapeMismatch, "upstream gradient shape mismatch");
  }
  ParamGradients grads;
  grads.weights.resize(layers);
  grads.biases.resize(layers);
  Matrix delta = grad_pre_projection;
  for (size_t l = layers; l-- > 0;) {
    grads.weights[l] = delta.transpose() * cache.layer_inputs[l];
    grads.biases[l] = delta.colwise().sum().transpose();
    if (l > 0) {
      delta = delta * state.weights[l];
      const Matrix& z = cache.pre_activations[l - 1];
      for (Eigen::Index i = 0; i < delta.rows(); ++i) {
        for (Eigen::Index j = 0; j < delta.cols(); ++j) {
          delta(i, j) *= activation_derivative(state.config.activation, z(i, j));
        }
      }
    }
  }
  return grads;
}

void adamw_step(EncoderState& state, const ParamGradients& grads,
                const TrainConfig& config) {
  if (grads.weights.size() != state.weights.size() ||
      grads.biases.size() != state.biases.size()) {
    raise(ErrorCode::kShapeMismatch, "gradient layer count mismatch");
  }
  for (size_t l = 0; l < state.weights.size(); ++l) {
    if (grads.weights[l].rows() != state.weights[l].rows() ||
        grads.weights[l].cols() != state.weights[l].cols() ||
        grads.biases[l].size() != state.biases[l].size()) {
      raise(ErrorCode::kShapeMismatch,
            "gradient shape mismatch at layer " + std::to_string(l));
    }
  }
  state.step_count += 1;
  const double bc1 = 1.0 - std::pow(config.adam_beta1, static_cast<double>(state.step_count));
  const double bc2 = 1.0 - std::pow(config.adam_beta2, static_cast<double>(state.step_count));
  for (size_t l = 0; l < state.weights.size(); ++l) {
    adamw_update(state.weights[l], state.m_weights[l], state.v_weights[l],
                 grads.weights[l], config, bc1, bc2);
    adamw_update(state.biases[l], state.m_biases[l], state.v_biases[l],
                 grads.biases[l], config, bc1, bc2);
  }
}

TrainResult train(const VectorDataset& dataset, const ViewRecipe& recipe,
                  const TrainConfig& train_config,
                  const EncoderConfig& encoder_config,
                  const EpochCallback& callback) {
  if (dataset.samples.cols() != encoder_config.input_dim) {
    raise(ErrorCode::kDimensionMismatch, "dataset dim != encoder input_dim");
  }
  return train_impl(dataset.size(), recipe, train_config, encoder_config,
                    callback,
                    [&](const std::vector<int64_t>& sources, int epoch) {
                      return assemble_vector_batch(dataset, sources, recipe,
                                                   train_config.seed, epoch);
                    });
}

TrainResult train(const RasterDataset& dataset, const ViewRecipe& recipe,
                  const TrainConfig& train_config,
                  const EncoderConfig& encoder_config,
                  const EpochCallback& callback) {
  if (dataset.images.empty()) raise(ErrorCode::kEmptyInput, "dataset is empty");
  const int input_dim = recipe.global_size * recipe.global_size *
                        dataset.images.front().channels;
  if (input_dim != encoder_config.input_dim) {
    raise(ErrorCode::kDimensionMismatch,
          "flattened view width != encoder input_dim");
  }
  return train_impl(static_cast<Eigen::Index>(dataset.size()), recipe,
                    train_config, encoder_config, callback,
                    [&](const std::vector<int64_t>& sources, int epoch) {
                      return assemble_raster_batch(dataset, sources, recipe,
                                                   train_config.seed, epoch);
                    });
}

Matrix embed(const EncoderState& state, const Matrix& inputs,
             FeatureLayer layer) {
  ForwardCache cache = forward(state, inputs);
  return layer == FeatureLayer::kEmbedding ? std::move(cache.embeddings)
                                           : std::move(cache.pre_projection);
}

Matrix embed(const EncoderState& state, const std::vector<RasterImage>& images,
             int view_size, FeatureLayer layer) {
  if (images.empty()) raise(ErrorCode::kEmptyInput, "no images to embed");
  const int input_dim = view_size * view_size * images.front().channels;
  Matrix inputs(static_cast<Eigen::Index>(images.size()), input_dim);
  for (size_t i = 0; i < images.size(); ++i) {
    inputs.row(static_cast<Eigen::Index>(i)) =
        bilinear_resize(images[i], view_size, view_size).flatten().transpose();
  }
  return embed(state, inputs, layer);
}

FreeEmbedResult train_free_embeddings(const FreeEmbedConfig& config) {
  if (config.n_sources < 2 || config.views_per_source < 2 || config.dim < 2) {
    raise(ErrorCode::kInvalidParam,
          "free-embedding run needs >= 2 sources, >= 2 views, dim >= 2");
  }
  const Eigen::Index n =
      static_cast<Eigen::Index>(config.n_sources) * config.views_per_source;
  Rng rng(derive_seed(config.seed, 0xF3EEULL));

  Matrix raw(n, config.dim);
  if (config.init == FreeInit::kConcentratedSpot) {
    const Vector spot = sample_uniform_sphere(config.dim, rng);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (int d = 0; d < config.dim; ++d) {
        raw(i, d) = spot[d] + config.init_sigma * rng.normal();
      }
    }
  } else {
    for (Eigen::Index i = 0; i < n; ++i) {
      raw.row(i) = sample_uniform_sphere(config.dim, rng).transpose();
    }
  }

  FreeEmbedResult result;
  result.source_id.reserve(static_cast<size_t>(n));
  for (int s = 0; s < config.n_sources; ++s) {
    for (int v = 0; v < config.views_per_source; ++v) {
      result.source_id.push_back(s);
    }
  }

  const KernelParams params = KernelParams::create(config.kappa, config.dim);
  const LossWeights weights{config.alpha, config.beta};
  TrainConfig opt;
  opt.learning_rate = config.learning_rate;
  opt.weight_decay = config.weight_decay;
  opt.adam_beta1 = config.adam_beta1;
  opt.adam_beta2 = config.adam_beta2;
  opt.adam_eps = config.adam_eps;

  Matrix m = Matrix::Zero(n, config.dim);
  Matrix v = Matrix::Zero(n, config.dim);
  for (int step = 1; step <= config.steps; ++step) {
    EmbeddingBatch batch;
    batch.rows.resize(n, config.dim);
    Vector norms(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      norms[i] = raw.row(i).norm();
      batch.rows.row(i) = raw.row(i) / norms[i];
    }
    batch.source_id = result.source_id;

    const LossBreakdown loss = mi_objective(batch, params, weights);
    check_finite(loss.training_loss, "free-embedding loss");
    const Matrix grad_z = mi_gradient(batch, params, weights);
    const Matrix grad_raw = pre_projection_gradient(grad_z, batch.rows, norms);

    const double bc1 = 1.0 - std::pow(opt.adam_beta1, static_cast<double>(step));
    const double bc2 = 1.0 - std::pow(opt.adam_beta2, static_cast<double>(step));
    adamw_update(raw, m, v, grad_raw, opt, bc1, bc2);
    check_finite(raw, "free embeddings");
    result.trajectory.push_back(loss);
  }

  result.embeddings.resize(n, config.dim);
  for (Eigen::Index i = 0; i < n; ++i) {
    result.embeddings.row(i) = raw.row(i) / raw.row(i).norm();
  }
  return result;
}

void save_checkpoint(const std::string& path, const EncoderState& state) {
  ManifestWriter blob;
  blob.section("encoder");
  blob.kv("input_dim", static_cast<int64_t>(state.config.input_dim));
  std::string hidden;
  for (size_t i = 0; i < state.config.hidden_dims.size(); ++i) {
    if (i) hidden += ",";
    hidden += std::to_string(state.config.hidden_dims[i]);
  }
  blob.kv("hidden_dims", hidden);
  blob.kv("projector_dim", static_cast<int64_t>(state.config.projector_dim));
  blob.kv("activation", std::string(to_string(state.config.activation)));
  blob.kv("seed", state.config.seed);
  blob.kv("step_count", state.step_count);
  const std::string text = blob.str();

  std::string bytes;
  bytes.append(kCheckpointMagic, 4);
  put_u32(bytes, kCheckpointVersion);
  put_u32(bytes, static_cast<uint32_t>(text.size()));
  bytes += text;
  for (size_t l = 0; l < state.weights.size(); ++l) {
    const Matrix& w = state.weights[l];
    put_u32(bytes, 2);
    put_u32(bytes, static_cast<uint32_t>(w.rows()));
    put_u32(bytes, static_cast<uint32_t>(w.cols()));
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) put_f64(bytes, w(r, c));
    }
    const Vector& b = state.biases[l];
    put_u32(bytes, 1);
    put_u32(bytes, static_cast<uint32_t>(b.size()));
    for (Eigen::Index i = 0; i < b.size(); ++i) put_f64(bytes, b[i]);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) raise(ErrorCode::kIoError, "cannot open '" + path + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) raise(ErrorCode::kIoError, "short write to '" + path + "'");
}

EncoderState load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorCode::kIoError, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  ByteReader reader(buf.str(), path);

  reader.expect_magic(kCheckpointMagic);
  const uint32_t version = reader.u32();
  if (version != kCheckpointVersion) {
    raise(ErrorCode::kVersionUnsupported,
          path + ": checkpoint version " + std::to_string(version) + " unsupported");
  }
  const uint32_t blob_len = reader.u32();
  const Config blob = Config::parse_string(reader.text(blob_len), path);

  EncoderConfig config;
  config.input_dim = static_cast<int>(blob.get_int("encoder.input_dim"));
  config.hidden_dims = blob.get_int_list("encoder.hidden_dims", {});
  config.projector_dim = static_cast<int>(blob.get_int("encoder.projector_dim"));
  config.activation = parse_activation(blob.get_string("encoder.activation"));
  config.seed = blob.get_u64("encoder.seed");

  EncoderState state = EncoderState::init(config);
  state.step_count = blob.get_int("encoder.step_count", 0);
  for (size_t l = 0; l < state.weights.size(); ++l) {
    uint32_t rank = reader.u32();
    if (rank != 2) raise(ErrorCode::kTruncatedPayload, path + ": expected rank-2 tensor");
    const uint32_t rows = reader.u32();
    const uint32_t cols = reader.u32();
    if (rows != static_cast<uint32_t>(state.weights[l].rows()) ||
        cols != static_cast<uint32_t>(state.weights[l].cols())) {
      raise(ErrorCode::kShapeMismatch, path + ": weight tensor shape mismatch");
    }
    for (uint32_t r = 0; r < rows; ++r) {
      for (uint32_t c = 0; c < cols; ++c) {
        state.weights[l](r, c) = reader.f64();
      }
    }
    rank = reader.u32();
    if (rank != 1) raise(ErrorCode::kTruncatedPayload, path + ": expected rank-1 tensor");
    const uint32_t len = reader.u32();
    if (len != static_cast<uint32_t>(state.biases[l].size())) {
      raise(ErrorCode::kShapeMismatch, path + ": bias tensor shape mismatch");
    }
    for (uint32_t i = 0; i < len; ++i) state.biases[l][i] = reader.f64();
  }
  reader.expect_end();
  return state;
}

}  // namespace hydes
