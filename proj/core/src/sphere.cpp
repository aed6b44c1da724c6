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

#include "hydes/sphere.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "hydes/errors.hpp"

namespace hydes {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112353;

double log_add_exp(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double m = a > b ? a : b;
  return m + std::log1p(std::exp(-std::fabs(a - b)));
}

/// Ascending power series of I_nu in log space. All terms are positive so
/// the log-sum-exp accumulation never cancels; cost is O(x) terms past the
/// peak near k ~ x/2.
double log_bessel_i_series(double nu, double x) {
  const double log_half_x = std::log(0.5 * x);
  double log_term = nu * log_half_x - std::lgamma(nu + 1.0);
  double acc = log_term;
  for (long k = 1; k < 20000000L; ++k) {
    log_term += 2.0 * log_half_x - std::log(static_cast<double>(k)) -
                std::log(nu + static_cast<double>(k));
    acc = log_add_exp(acc, log_term);
    const bool past_peak =
        static_cast<double>(k + 1) * (nu + static_cast<double>(k + 1)) >
        0.25 * x * x;
    if (past_peak && log_term < acc - 45.0) break;
  }
  return acc;
}

/// Hankel asymptotic expansion for large argument,
///   I_nu(x) ~ e^x / sqrt(2 pi x) * [S1 - sin(nu pi) e^{-2x} S2],
/// with S1/S2 summed adaptively to their smallest term. Returns false when
/// the smallest term cannot certify ~1e-13 relative accuracy (the series
/// diverges before it gets small), in which case the caller must use the
/// power series instead.
bool log_bessel_i_asymptotic(double nu, double x, double* out) {
  const double four_nu_sq = 4.0 * nu * nu;
  double term = 1.0;  // a_k(nu) / x^k
  double s1 = 1.0;    // sum of (-1)^k a_k / x^k
  double s2 = 1.0;    // sum of a_k / x^k
  double smallest = 1.0;
  for (int k = 1; k <= 200; ++k) {
    const double odd = 2.0 * k - 1.0;
    const double next = term * (four_nu_sq - odd * odd) / (8.0 * k * x);
    if (std::fabs(next) >= std::fabs(term)) break;  // divergence onset
    term = next;
    s1 += (k % 2 == 1) ? -term : term;
    s2 += term;
    smallest = std::fabs(term);
    if (smallest < 1e-17 * std::fabs(s1)) break;
  }
  if (!(smallest < 1e-13 * std::fabs(s1)) || s1 <= 0.0) return false;
  const double reflection = -std::sin(nu * M_PI) * std::exp(-2.0 * x) * s2;
  const double bracket = s1 + reflection;
  if (bracket <= 0.0) return false;
  *out = x - 0.5 * (kLog2Pi + std::log(x)) + std::log(bracket);
  return true;
}

}  // namespace

KernelParams KernelParams::create(double kappa, int dim, bool include_const) {
  KernelParams p;
  p.kappa = kappa;
  p.dim = dim;
  p.include_const = include_const;
  p.log_norm_const = log_vmf_normalizer(kappa, dim);
  return p;
}

Vector project_to_sphere(const Vector& v, double eps) {
  if (v.size() < 2) {
    raise(ErrorCode::kInvalidParam, "projection requires D >= 2 components");
  }
  const double norm = v.norm();
  if (norm < eps) {
    raise(ErrorCode::kNormTooSmall,
          "vector norm " + std::to_string(norm) + " below eps");
  }
  return v / norm;
}

Matrix project_rows_to_sphere(const Matrix& m, double eps) {
  Matrix out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    out.row(i) = project_to_sphere(m.row(i).transpose(), eps).transpose();
  }
  return out;
}

Matrix cosine_similarity_matrix(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) {
    raise(ErrorCode::kDimensionMismatch,
          "embedding dimensions differ: " + std::to_string(a.cols()) + " vs " +
              std::to_string(b.cols()));
  }
  Matrix s = a * b.transpose();
  return s.cwiseMax(-1.0).cwiseMin(1.0);
}

double log_sphere_surface_area(int dim) {
  if (dim < 2) raise(ErrorCode::kInvalidParam, "sphere dimension must be >= 2");
  const double half_d = 0.5 * static_cast<double>(dim);
  return std::log(2.0) + half_d * std::log(M_PI) - std::lgamma(half_d);
}

double log_bessel_i(double nu, double x) {
  if (nu < 0.0 || x < 0.0) {
    raise(ErrorCode::kInvalidParam, "log_bessel_i requires nu >= 0 and x >= 0");
  }
  if (x == 0.0) {
    return nu == 0.0 ? 0.0 : -std::numeric_limits<double>::infinity();
  }
  if (x >= std::max(10.0, nu)) {
    double out;
    if (log_bessel_i_asymptotic(nu, x, &out)) return out;
  }
  return log_bessel_i_series(nu, x);
}

double log_vmf_normalizer(double kappa, int dim) {
  if (kappa < 0.0) raise(ErrorCode::kInvalidParam, "kappa must be >= 0");
  if (dim < 2) raise(ErrorCode::kInvalidParam, "dimension must be >= 2");
  if (kappa == 0.0) return -log_sphere_surface_area(dim);
  const double nu = 0.5 * dim - 1.0;
  return nu * std::log(kappa) - 0.5 * dim * kLog2Pi - log_bessel_i(nu, kappa);
}

double log_vmf_kernel(double s, const KernelParams& params) {
  const double value = params.kappa * s;
  return params.include_const ? value + params.log_norm_const : value;
}

double vmf_mean_resultant_length(int dim, double kappa) {
  if (dim < 2 || kappa < 0.0) {
    raise(ErrorCode::kInvalidParam, "vmf_mean_resultant_length: bad arguments");
  }
  if (kappa == 0.0) return 0.0;
  const double nu = 0.5 * dim - 1.0;
  return std::exp(log_bessel_i(nu + 1.0, kappa) - log_bessel_i(nu, kappa));
}

}  // namespace hydes
