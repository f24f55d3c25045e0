// Copyright 2026 The RidgeSVM Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RIDGESVM_KERNELS_HPP
#define RIDGESVM_KERNELS_HPP

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ridgesvm/error.hpp"
#include "ridgesvm/linalg.hpp"

namespace ridgesvm {

using FeatureVector = std::vector<double>;

enum class KernelFamily { linear, polynomial, rbf };

constexpr std::string_view to_string(KernelFamily f) {
  switch (f) {
    case KernelFamily::linear: return "linear";
    case KernelFamily::polynomial: return "polynomial";
    case KernelFamily::rbf: return "rbf";
  }
  return "unknown";
}

inline KernelFamily kernel_family_from_string(std::string_view s) {
  if (s == "linear") return KernelFamily::linear;
  if (s == "polynomial" || s == "poly") return KernelFamily::polynomial;
  if (s == "rbf") return KernelFamily::rbf;
  throw Error(Errc::invalid_kernel, "unknown kernel family '" + std::string(s) + "'");
}

/// Kernel family and parameters plus the ridge ρ added to the Gram diagonal.
///   linear:     a·b
///   polynomial: (a·b + offset)^degree
///   rbf:        exp(−‖a−b‖² / (2σ²))
struct KernelSpec {
  KernelFamily family = KernelFamily::rbf;
  int degree = 2;
  double offset = 1.0;
  double sigma = 1.0;
  double ridge = 0.0;

  static KernelSpec linear(double ridge) { return {KernelFamily::linear, 1, 0.0, 1.0, ridge}; }
  static KernelSpec polynomial(int degree, double offset, double ridge) {
    return {KernelFamily::polynomial, degree, offset, 1.0, ridge};
  }
  static KernelSpec rbf(double sigma, double ridge) { return {KernelFamily::rbf, 2, 1.0, sigma, ridge}; }

  void validate() const {
    if (!(ridge >= 0.0) || !std::isfinite(ridge)) {
      throw Error(Errc::invalid_kernel, "ridge must be >= 0");
    }
    if (family == KernelFamily::rbf && !(sigma > 0.0)) {
      throw Error(Errc::invalid_kernel, "rbf sigma must be > 0");
    }
    if (family == KernelFamily::polynomial && degree < 1) {
      throw Error(Errc::invalid_kernel, "polynomial degree must be >= 1");
    }
  }

  bool operator==(const KernelSpec&) const = default;
};

/// Kernel value; the ridge is never applied here.
inline double kernel_eval(std::span<const double> a, std::span<const double> b, const KernelSpec& spec) {
  if (a.size() != b.size()) {
    throw Error(Errc::dimension_mismatch, "kernel_eval: " + std::to_string(a.size()) + " vs " +
                                              std::to_string(b.size()) + " features");
  }
  switch (spec.family) {
    case KernelFamily::linear: {
      double dot = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
      return dot;
    }
    case KernelFamily::polynomial: {
      double dot = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
      const double base = dot + spec.offset;
      double out = 1.0;
      for (int d = 0; d < spec.degree; ++d) out *= base;
      return out;
    }
    case KernelFamily::rbf: {
      double sq = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        sq += d * d;
      }
      return std::exp(-sq / (2.0 * spec.sigma * spec.sigma));
    }
  }
  return 0.0;
}

/// K + ρI over a sample set (the regression Q-matrix).
inline DenseMatrix q_matrix_svr(std::span<const FeatureVector> xs, const KernelSpec& spec) {
  spec.validate();
  const auto n = static_cast<Eigen::Index>(xs.size());
  DenseMatrix q(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double k = kernel_eval(xs[static_cast<std::size_t>(i)], xs[static_cast<std::size_t>(j)], spec);
      q(i, j) = k;
      q(j, i) = k;
    }
    q(i, i) += spec.ridge;
  }
  return q;
}

/// Q[i,j] = y_i y_j (K(x_i,x_j) + ρ[i=j]) (the classification Q-matrix).
inline DenseMatrix q_matrix(std::span<const FeatureVector> xs, std::span<const double> labels,
                            const KernelSpec& spec) {
  if (xs.size() != labels.size()) {
    throw Error(Errc::dimension_mismatch, "q_matrix: sample and label counts differ");
  }
  for (double y : labels) {
    if (y != 1.0 && y != -1.0) throw Error(Errc::invalid_kernel, "q_matrix: labels must be +1/-1");
  }
  DenseMatrix q = q_matrix_svr(xs, spec);
  for (Eigen::Index i = 0; i < q.rows(); ++i) {
    for (Eigen::Index j = 0; j < q.cols(); ++j) {
      q(i, j) *= labels[static_cast<std::size_t>(i)] * labels[static_cast<std::size_t>(j)];
    }
  }
  return q;
}

}  // namespace ridgesvm

#endif  // RIDGESVM_KERNELS_HPP
