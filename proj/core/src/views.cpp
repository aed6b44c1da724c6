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

#include "hydes/views.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hydes/errors.hpp"

namespace hydes {

namespace {

constexpr double kAspectLo = 0.75;  // 3/4
constexpr double kAspectHi = 4.0 / 3.0;

int clamp_int(int v, int lo, int hi) { return std::max(lo, std::min(hi, v)); }

RasterImage crop(const RasterImage& image, const detail::CropRect& rect) {
  RasterImage out = RasterImage::zeros(rect.h, rect.w, image.channels);
  for (int c = 0; c < image.channels; ++c) {
    for (int y = 0; y < rect.h; ++y) {
      for (int x = 0; x < rect.w; ++x) {
        out.at(c, y, x) = image.at(c, rect.y0 + y, rect.x0 + x);
      }
    }
  }
  return out;
}

void hflip_inplace(RasterImage& image) {
  for (int c = 0; c < image.channels; ++c) {
    for (int y = 0; y < image.height; ++y) {
      for (int x = 0; x < image.width / 2; ++x) {
        std::swap(image.at(c, y, x), image.at(c, y, image.width - 1 - x));
      }
    }
  }
}

/// Contrast about the per-image mean, then brightness, then clamp. Factor
/// ranges shrink to identity as strength goes to zero.
void jitter_inplace(RasterImage& image, double strength, Rng& rng) {
  const double contrast = 1.0 + strength * rng.uniform(-0.5, 0.5);
  const double brightness = 1.0 + strength * rng.uniform(-0.5, 0.5);
  double mean = 0.0;
  for (double v : image.values) mean += v;
  mean /= static_cast<double>(image.values.size());
  for (double& v : image.values) {
    v = std::clamp(brightness * (mean + contrast * (v - mean)), 0.0, 1.0);
  }
}

ImageView make_view(const RasterImage& image, double lo, double hi,
                    int target_size, ViewKind kind, const ViewRecipe& recipe,
                    Rng& rng) {
  const detail::CropRect rect =
      detail::sample_crop(image.width, image.height, lo, hi, rng);
  RasterImage view = bilinear_resize(crop(image, rect), target_size, target_size);
  if (rng.uniform() < recipe.hflip_prob) hflip_inplace(view);
  if (recipe.jitter_strength > 0.0) {
    jitter_inplace(view, recipe.jitter_strength, rng);
  }
  return {std::move(view), kind};
}

}  // namespace

namespace detail {

/// Area fraction uniform in [lo, hi], log-uniform aspect in [3/4, 4/3];
/// rejected draws (crop would not fit) retry up to ten times before the
/// centered-square fallback of the sampled area.
CropRect sample_crop(int width, int height, double lo, double hi, Rng& rng) {
  const double area = static_cast<double>(width) * height;
  for (int attempt = 0; attempt < 10; ++attempt) {
    const double frac = rng.uniform(lo, hi);
    const double ratio =
        std::exp(rng.uniform(std::log(kAspectLo), std::log(kAspectHi)));
    const double target = frac * area;
    const int w = static_cast<int>(std::lround(std::sqrt(target * ratio)));
    const int h = static_cast<int>(std::lround(std::sqrt(target / ratio)));
    if (w < 2 || h < 2 || w > width || h > height) continue;
    const int x0 = static_cast<int>(rng.uniform_index(width - w + 1));
    const int y0 = static_cast<int>(rng.uniform_index(height - h + 1));
    return {x0, y0, w, h};
  }
  const double frac = rng.uniform(lo, hi);
  const int side = clamp_int(
      static_cast<int>(std::lround(std::sqrt(frac * area))), 2,
      std::min(width, height));
  return {(width - side) / 2, (height - side) / 2, side, side};
}

}  // namespace detail

void ViewRecipe::validate() const {
  auto bad_interval = [](double lo, double hi) {
    return !(lo > 0.0 && hi <= 1.0 && lo <= hi);
  };
  if (n_global < 1) raise(ErrorCode::kInvalidParam, "recipe needs n_global >= 1");
  if (n_local < 0) raise(ErrorCode::kInvalidParam, "n_local must be >= 0");
  if (bad_interval(global_scale_lo, global_scale_hi) ||
      bad_interval(local_scale_lo, local_scale_hi)) {
    raise(ErrorCode::kInvalidParam, "scale intervals must be within (0, 1] with lo <= hi");
  }
  if (hflip_prob < 0.0 || hflip_prob > 1.0) {
    raise(ErrorCode::kInvalidParam, "hflip_prob must be in [0, 1]");
  }
  if (jitter_strength < 0.0) {
    raise(ErrorCode::kInvalidParam, "jitter_strength must be >= 0");
  }
  if (global_size < 1 || local_size < 1) {
    raise(ErrorCode::kInvalidParam, "view sizes must be >= 1 pixel");
  }
}

RasterImage RasterImage::zeros(int height, int width, int channels) {
  RasterImage img;
  img.height = height;
  img.width = width;
  img.channels = channels;
  img.values.assign(static_cast<size_t>(height) * width * channels, 0.0);
  return img;
}

Vector RasterImage::flatten() const {
  Vector out(static_cast<Eigen::Index>(values.size()));
  for (size_t i = 0; i < values.size(); ++i) {
    out[static_cast<Eigen::Index>(i)] = values[i];
  }
  return out;
}

RasterImage bilinear_resize(const RasterImage& image, int out_height,
                            int out_width) {
  RasterImage out = RasterImage::zeros(out_height, out_width, image.channels);
  const double sy = out_height > 1
                        ? static_cast<double>(image.height - 1) / (out_height - 1)
                        : 0.0;
  const double sx = out_width > 1
                        ? static_cast<double>(image.width - 1) / (out_width - 1)
                        : 0.0;
  const double cy = out_height > 1 ? 0.0 : 0.5 * (image.height - 1);
  const double cx = out_width > 1 ? 0.0 : 0.5 * (image.width - 1);
  for (int c = 0; c < image.channels; ++c) {
    for (int y = 0; y < out_height; ++y) {
      const double fy = cy + sy * y;
      const int y0 = std::min(static_cast<int>(fy), image.height - 1);
      const int y1 = std::min(y0 + 1, image.height - 1);
      const double wy = fy - y0;
      for (int x = 0; x < out_width; ++x) {
        const double fx = cx + sx * x;
        const int x0 = std::min(static_cast<int>(fx), image.width - 1);
        const int x1 = std::min(x0 + 1, image.width - 1);
        const double wx = fx - x0;
        const double top =
            (1.0 - wx) * image.at(c, y0, x0) + wx * image.at(c, y0, x1);
        const double bottom =
            (1.0 - wx) * image.at(c, y1, x0) + wx * image.at(c, y1, x1);
        out.at(c, y, x) = (1.0 - wy) * top + wy * bottom;
      }
    }
  }
  return out;
}

std::vector<ImageView> multicrop(const RasterImage& image,
                                 const ViewRecipe& recipe, Rng& rng) {
  recipe.validate();
  const double area = static_cast<double>(image.width) * image.height;
  const double min_frac = std::min(recipe.global_scale_lo, recipe.local_scale_lo);
  // Smallest admissible crop must still be >= 2x2 at the extreme aspect.
  if (std::sqrt(min_frac * area * kAspectLo) < 2.0) {
    raise(ErrorCode::kImageTooSmall,
          "image " + std::to_string(image.width) + "x" +
              std::to_string(image.height) + " cannot host the smallest crop");
  }
  std::vector<ImageView> views;
  views.reserve(static_cast<size_t>(recipe.total_views()));
  for (int i = 0; i < recipe.n_global; ++i) {
    views.push_back(make_view(image, recipe.global_scale_lo,
                              recipe.global_scale_hi, recipe.global_size,
                              ViewKind::kGlobal, recipe, rng));
  }
  for (int i = 0; i < recipe.n_local; ++i) {
    views.push_back(make_view(image, recipe.local_scale_lo,
                              recipe.local_scale_hi, recipe.local_size,
                              ViewKind::kLocal, recipe, rng));
  }
  return views;
}

Vector sample_uniform_sphere(int dim, Rng& rng) {
  if (dim < 2) raise(ErrorCode::kInvalidParam, "sphere dimension must be >= 2");
  Vector g(dim);
  for (;;) {
    for (int i = 0; i < dim; ++i) g[i] = rng.normal();
    const double norm = g.norm();
    if (norm > 1e-12) return g / norm;
  }
}

Vector sample_vmf(const Vector& mean_dir, double kappa, Rng& rng) {
  const int dim = static_cast<int>(mean_dir.size());
  if (dim < 2) raise(ErrorCode::kInvalidParam, "vMF dimension must be >= 2");
  if (kappa < 0.0) raise(ErrorCode::kInvalidParam, "kappa must be >= 0");
  if (kappa == 0.0) return sample_uniform_sphere(dim, rng);

  const double dm1 = dim - 1.0;
  // b written to avoid the 2*kappa cancellation at large kappa.
  const double b = dm1 / (std::sqrt(4.0 * kappa * kappa + dm1 * dm1) + 2.0 * kappa);
  const double x0 = (1.0 - b) / (1.0 + b);
  const double c = kappa * x0 + dm1 * std::log(1.0 - x0 * x0);

  double w;
  for (;;) {
    const double z = rng.beta(0.5 * dm1, 0.5 * dm1);
    const double u = rng.uniform();
    w = (1.0 - (1.0 + b) * z) / (1.0 - (1.0 - b) * z);
    if (kappa * w + dm1 * std::log(1.0 - x0 * w) - c >=
        std::log(u + 0x1.0p-53)) {
      break;
    }
  }

  // Uniform direction in the tangent plane of mean_dir.
  Vector tangent(dim);
  for (;;) {
    for (int i = 0; i < dim; ++i) tangent[i] = rng.normal();
    tangent -= tangent.dot(mean_dir) * mean_dir;
    const double norm = tangent.norm();
    if (norm > 1e-12) {
      tangent /= norm;
      break;
    }
  }
  Vector out = w * mean_dir + std::sqrt(std::max(0.0, 1.0 - w * w)) * tangent;
  return out / out.norm();
}

std::vector<Vector> synthetic_views(const Vector& center, int n_views,
                                    double noise_kappa, Rng& rng) {
  if (noise_kappa <= 0.0) {
    raise(ErrorCode::kInvalidParam, "synthetic_views requires noise_kappa > 0");
  }
  std::vector<Vector> out;
  out.reserve(static_cast<size_t>(n_views));
  for (int i = 0; i < n_views; ++i) {
    out.push_back(sample_vmf(center, noise_kappa, rng));
  }
  return out;
}

}  // namespace hydes
