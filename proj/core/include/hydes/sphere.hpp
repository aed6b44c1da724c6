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

#include <Eigen/Dense>

namespace hydes {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// vMF kernel parameters: concentration kappa, ambient dimension D, and the
/// cached log normalization constant log C_D(kappa). With include_const the
/// kernel is a proper density on S^{D-1}; without it only the exponential
/// part kappa * s is evaluated.
struct KernelParams {
  double kappa = 1.0;
  int dim = 2;
  double log_norm_const = 0.0;
  bool include_const = true;

  static KernelParams create(double kappa, int dim, bool include_const = true);
};

/// v / ||v||. Throws NormTooSmall when ||v|| < eps.
Vector project_to_sphere(const Vector& v, double eps = 1e-12);

/// Row-normalizes a matrix of raw vectors. Throws NormTooSmall on any
/// degenerate row.
Matrix project_rows_to_sphere(const Matrix& m, double eps = 1e-12);

/// Pairwise dot products of unit rows, clamped to [-1, 1] after the product
/// so downstream arccos never sees 1 + ulp.
Matrix cosine_similarity_matrix(const Matrix& a, const Matrix& b);

/// log of the surface area of S^{D-1} = 2 pi^{D/2} / Gamma(D/2).
double log_sphere_surface_area(int dim);

/// log I_nu(x) for nu >= 0, x >= 0, evaluated entirely in log space.
/// Power series below x = max(10, nu); Hankel-type asymptotic expansion
/// (with the exponentially small reflection series) above, with a fallback
/// to the series whenever the asymptotic tail cannot certify ~1e-13
/// relative accuracy. No intermediate overflow up to x = 1e4, nu ~ 2e3.
double log_bessel_i(double nu, double x);

/// log C_D(kappa) = (D/2 - 1) log kappa - (D/2) log(2 pi) - log I_{D/2-1}(kappa),
/// continuously extended at kappa = 0 to -log |S^{D-1}|.
double log_vmf_normalizer(double kappa, int dim);

/// log K_kappa(s): kappa * s (+ log C_D(kappa) when include_const).
double log_vmf_kernel(double s, const KernelParams& params);

/// Mean resultant length A_D(kappa) = I_{D/2}(kappa) / I_{D/2-1}(kappa).
double vmf_mean_resultant_length(int dim, double kappa);

}  // namespace hydes
