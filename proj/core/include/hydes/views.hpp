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

#include <vector>

#include "hydes/objective.hpp"
#include "hydes/rng.hpp"
#include "hydes/sphere.hpp"

namespace hydes {

/// Multi-crop recipe: a few large-scale views plus several small-scale
/// views per image. Scale intervals are area fractions of the source image.
struct ViewRecipe {
  int n_global = 2;
  int n_local = 6;
  double global_scale_lo = 0.40;
  double global_scale_hi = 1.00;
  double local_scale_lo = 0.05;
  double local_scale_hi = 0.40;
  int global_size = 32;
  int local_size = 16;
  double hflip_prob = 0.5;
  double jitter_strength = 0.0;

  int total_views() const { return n_global + n_local; }
  void validate() const;
};

/// Planar raster image (values[c][y][x] flattened), intensities in [0, 1].
struct RasterImage {
  int height = 0;
  int width = 0;
  int channels = 1;
  std::vector<double> values;

  static RasterImage zeros(int height, int width, int channels);
  double at(int c, int y, int x) const {
    return values[static_cast<size_t>((c * height + y) * width + x)];
  }
  double& at(int c, int y, int x) {
    return values[static_cast<size_t>((c * height + y) * width + x)];
  }
  Vector flatten() const;
};

struct ImageView {
  RasterImage image;
  ViewKind kind = ViewKind::kGlobal;
};

/// Corner-aligned bilinear resize: source coordinate of output pixel x is
/// x * (in - 1) / (out - 1), and the single-pixel case samples the center.
RasterImage bilinear_resize(const RasterImage& image, int out_height,
                            int out_width);

/// Emits n_global + n_local random crops, resized to their target sizes,
/// with optional horizontal flip and brightness/contrast jitter.
/// Deterministic given the generator state.
std::vector<ImageView> multicrop(const RasterImage& image,
                                 const ViewRecipe& recipe, Rng& rng);

/// One draw from vMF(mean_dir, kappa) via the standard rejection sampler
/// for the radial component plus a uniform tangent direction. kappa == 0
/// gives a uniform sphere sample.
Vector sample_vmf(const Vector& mean_dir, double kappa, Rng& rng);

/// n_views perturbed copies of `center` for controlled positive sets.
std::vector<Vector> synthetic_views(const Vector& center, int n_views,
                                    double noise_kappa, Rng& rng);

/// Uniform sample on S^{D-1}.
Vector sample_uniform_sphere(int dim, Rng& rng);

namespace detail {

struct CropRect {
  int x0 = 0, y0 = 0, w = 0, h = 0;
};

/// Crop-rectangle sampler behind multicrop: area fraction uniform in
/// [lo, hi], log-uniform aspect in [3/4, 4/3], ten fitting attempts then a
/// centered-square fallback of the sampled area.
CropRect sample_crop(int width, int height, double lo, double hi, Rng& rng);

}  // namespace detail

}  // namespace hydes
