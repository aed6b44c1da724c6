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
#include <string>
#include <utility>
#include <vector>

#include "hydes/sphere.hpp"
#include "hydes/views.hpp"

namespace hydes {

/// Binary embedding dump. On disk: header {magic "HYDE", version u32, N u32,
/// D u32, flags u32}, then N*D little-endian float32 values row-major.
/// Labels and source ids travel in text sidecar files, one integer per line.
struct EmbeddingDump {
  static constexpr uint32_t kVersion = 1;
  static constexpr uint32_t kFlagUnitNorm = 1u;

  Matrix rows;  // float32 payload widened to double in memory
  uint32_t flags = 0;

  bool unit_norm() const { return (flags & kFlagUnitNorm) != 0; }
};

void write_dump(const std::string& path, const EmbeddingDump& dump);
EmbeddingDump read_dump(const std::string& path);

void write_labels(const std::string& path, const std::vector<int64_t>& labels);
std::vector<int64_t> read_labels(const std::string& path);

/// Synthetic vMF-mixture dataset: class centers spread on the sphere,
/// samples concentrated around them, plus the view noise level the training
/// pipeline uses to make positives.
struct SyntheticSpec {
  int n_classes = 3;
  int samples_per_class = 200;
  int dim = 16;
  double class_kappa = 20.0;
  double view_kappa = 50.0;
  uint64_t seed = 1;

  void validate() const;
};

struct VectorDataset {
  Matrix samples;               // N x dim unit rows
  std::vector<int64_t> labels;  // N entries
  Matrix class_centers;         // n_classes x dim
  double view_kappa = 50.0;

  Eigen::Index size() const { return samples.rows(); }
};

/// Class centers drawn uniformly with pairwise angle >= 30 degrees
/// (rejection capped at 1e5 attempts), samples from vMF(center, class_kappa).
VectorDataset generate_synthetic(const SyntheticSpec& spec);

struct RasterDataset {
  std::vector<RasterImage> images;
  std::vector<int64_t> labels;

  size_t size() const { return images.size(); }
};

/// CIFAR-style binary reader: each record is one label byte followed by
/// channels*height*width pixel bytes, channel-planar. Pixels scale to [0, 1].
RasterDataset load_raster_dataset(const std::string& path, int height,
                                  int width, int channels);

/// Ordered key = value writer in the config file format, so manifests parse
/// back with Config. Every run writes one of these next to its outputs.
class ManifestWriter {
 public:
  void section(const std::string& name);
  void kv(const std::string& key, const std::string& value);
  void kv(const std::string& key, int64_t value);
  void kv(const std::string& key, uint64_t value);
  void kv(const std::string& key, double value);
  void kv(const std::string& key, bool value);
  void write(const std::string& path) const;
  std::string str() const;

 private:
  std::vector<std::pair<std::string, std::string>> lines_;
};

}  // namespace hydes
